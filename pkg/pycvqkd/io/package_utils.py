import pkg_resources
from shutil import copyfile


def get_path_of_data_file(data_file):
    file_path = pkg_resources.resource_filename("pycvqkd", f"data/{data_file}")

    return file_path


def copy_package_data(data_file, destination="."):

    data_file_path = get_path_of_data_file(data_file)
    copyfile(data_file_path, f"{destination}/{data_file}")


def copy_template(destination="."):
    """
    copy the documented scenario configuration
    into a directory (default: the working directory)
    """

    copy_package_data("template_config.yaml", destination)
