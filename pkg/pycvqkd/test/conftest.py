import os

import numpy as np
import pytest

from pycvqkd import ChannelParams, copy_template
from pycvqkd.io.package_utils import get_path_of_data_file


@pytest.fixture(scope="session")
def channel():

    return ChannelParams(eta=0.5, delta=0.1, v_a=10.0)


@pytest.fixture(scope="session")
def random_channels():
    """
    100 valid channels away from the delta = 2 eta edge
    """

    rng = np.random.default_rng(1234)

    channels = []

    for _ in range(100):

        eta = rng.uniform(0.1, 1.0)
        delta = rng.uniform(0.05, 1.5) * eta
        v_a = 10 ** rng.uniform(0.0, 3.0)

        channels.append(ChannelParams(eta, delta, v_a))

    return channels


@pytest.fixture(scope="function")
def template_config(tmp_path):

    copy_template(str(tmp_path))

    yield os.path.join(str(tmp_path), "template_config.yaml")


@pytest.fixture(scope="session")
def golden_thresholds():

    return get_path_of_data_file("golden_thresholds_va10.csv")
