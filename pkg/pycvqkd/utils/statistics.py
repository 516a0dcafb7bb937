import numpy as np
import scipy.stats as stats


def standard_error(variance_estimate, samples):
    """
    standard error of a Gaussian (residual) variance
    estimate: estimate * sqrt(2 / (samples - 1))
    """

    if samples < 2:

        raise ValueError(f"a standard error needs at least two samples, got {samples}")

    return variance_estimate * np.sqrt(2.0 / (samples - 1))


def z_score(estimate, expected, se):

    if se <= 0:

        return 0.0 if estimate == expected else np.inf

    return (estimate - expected) / se


def two_sided_p_value(z):
    """
    probability of a deviation at least |z| sigma
    """

    return 2.0 * stats.norm.sf(np.abs(z))
