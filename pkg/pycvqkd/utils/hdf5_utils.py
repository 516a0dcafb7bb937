import h5py
import numpy as np

_SCALARS = (np.ndarray, np.integer, np.floating, str, bytes, float, int)


def recursively_save_dict_contents_to_group(h5file, path, dic):
    """
    write a nested dict of scalars, strings and arrays
    below path; nested dicts become groups and booleans
    are stored as 0/1 integers
    """

    for key, item in dic.items():

        if isinstance(item, (bool, np.bool_)):

            h5file[f"{path}/{key}"] = int(item)

        elif isinstance(item, _SCALARS):

            h5file[f"{path}/{key}"] = item

        elif isinstance(item, dict):

            recursively_save_dict_contents_to_group(h5file, f"{path}/{key}", item)

        else:

            raise ValueError(f"Cannot save {type(item)} type")


def recursively_load_dict_contents_from_group(h5file, path):
    """
    inverse of recursively_save_dict_contents_to_group;
    byte strings come back decoded
    """

    out = {}

    for key, item in h5file[path].items():

        if isinstance(item, h5py.Dataset):

            value = item[()]

            if isinstance(value, bytes):

                value = value.decode()

            out[key] = value

        elif isinstance(item, h5py.Group):

            out[key] = recursively_load_dict_contents_from_group(h5file, f"{path}/{key}")

    return out
