"""
Joint Gaussian moments of Alice's modulation and the
six output quadratures of the attack circuit.

Alice's classical variables (x_A, p_A) are adjoined as
Gaussian variables of variance V_A/4 and enter mode a
through x_a = x_A + vacuum, so every mixed moment of the
prepare-and-measure ensemble follows from one congruence.
"""

import enum
import logging

import numpy as np

from .circuit import CircuitParams, build_circuit
from .quadrature import DIM, VACUUM_VARIANCE, Quadrature

log = logging.getLogger(__name__)

N_VARIABLES = DIM + 2


class Variable(enum.IntEnum):
    X_ALICE = 0
    P_ALICE = 1
    X_BOB = 2  # x_a''
    P_BOB = 3  # p_a''
    X_CLONE = 4  # x_b''
    P_CLONE = 5  # p_b''
    X_ANTICLONE = 6  # x_c''
    P_ANTICLONE = 7  # p_c''


class VarianceConvention(enum.Enum):
    QUADRATURE = "quadrature"
    SHOT_NOISE = "shot_noise"

    @property
    def scale(self):
        """
        factor from quadrature units (vacuum 1/4) to this convention
        """

        return 1.0 if self is VarianceConvention.QUADRATURE else 4.0

    def convert(self, value):

        return self.scale * value


class ConditionalVariance(float):
    """
    A conditional variance that remembers whether the
    conditioning variable was degenerate (zero variance).
    """

    def __new__(cls, value, degenerate=False):

        obj = super(ConditionalVariance, cls).__new__(cls, value)
        obj._degenerate = degenerate

        return obj

    @property
    def degenerate(self):
        return self._degenerate


class JointMoments(object):
    def __init__(self, cov, channel=None, theta=None):
        """
        Zero-mean second moments over the ordered variables
        (x_A, p_A, x_a'', p_a'', x_b'', p_b'', x_c'', p_c'')
        in quadrature units.

        :param cov: 8x8 symmetric positive semidefinite matrix
        :param channel: the ChannelParams it was built from
        :param theta: Eve's beam splitter angle
        :returns:
        :rtype:

        """

        cov = np.array(cov, dtype=np.float64)

        assert cov.shape == (N_VARIABLES, N_VARIABLES), "joint moments are 8x8"

        scale = max(1.0, np.abs(cov).max())

        if np.abs(cov - cov.T).max() > 1e-14 * scale:

            raise ValueError("joint covariance is not symmetric")

        cov = 0.5 * (cov + cov.T)

        if np.linalg.eigvalsh(cov).min() < -1e-12 * scale:

            raise ValueError("joint covariance is not positive semidefinite")

        cov.setflags(write=False)

        self._cov = cov
        self._mean = np.zeros(N_VARIABLES)
        self._mean.setflags(write=False)
        self._channel = channel
        self._theta = theta

    @property
    def cov(self):
        return self._cov

    @property
    def mean(self):
        return self._mean

    @property
    def channel(self):
        return self._channel

    @property
    def theta(self):
        return self._theta

    @property
    def shot_noise_cov(self):
        return 4.0 * self._cov

    def variance(self, variable):

        return float(self._cov[variable, variable])

    def covariance(self, first, second):

        return float(self._cov[first, second])


def ensemble_moments(channel, theta=0.0):
    """
    Propagate Alice's Gaussian ensemble through the
    circuit that reproduces the channel.

    :param channel: ChannelParams
    :param theta: Eve's beam splitter angle
    :returns:
    :rtype: JointMoments

    """

    M = build_circuit(CircuitParams.from_channel(channel, theta)).matrix

    # sources: (x_A, p_A, six independent vacuum quadratures)
    sources = np.diag([0.25 * channel.v_a] * 2 + [VACUUM_VARIANCE] * DIM)

    # inputs of the circuit in terms of the sources
    embed = np.zeros((N_VARIABLES, N_VARIABLES))
    embed[0, 0] = embed[1, 1] = 1.0
    embed[2:, 2:] = np.eye(DIM)
    embed[2, 0] = embed[3, 1] = 1.0

    transfer = np.eye(N_VARIABLES)
    transfer[2:, 2:] = M

    T = transfer @ embed

    return JointMoments(T @ sources @ T.T, channel=channel, theta=theta)


def conditional_variance(
    moments, target, given, convention=VarianceConvention.QUADRATURE
):
    """
    Residual variance of target after the best linear
    estimate from given:

    V(x|y) = <dx^2> - |<dx dy>|^2 / <dy^2>

    Conditioning on a constant conveys nothing, so a
    degenerate given returns Var(target) flagged as degenerate.

    :param moments: JointMoments
    :param target: Variable
    :param given: Variable
    :param convention: VarianceConvention of the result
    :returns:
    :rtype: ConditionalVariance

    """

    var_target = moments.variance(target)
    var_given = moments.variance(given)

    if var_given <= 0.0:

        log.warning(
            f"conditioning {Variable(target).name} on degenerate {Variable(given).name}"
        )

        return ConditionalVariance(convention.convert(var_target), degenerate=True)

    residual = var_target - moments.covariance(target, given) ** 2 / var_given

    residual = min(max(residual, 0.0), var_target)

    return ConditionalVariance(convention.convert(residual))


def _bob_alice(quadrature):

    if Quadrature(quadrature) is Quadrature.X:

        return Variable.X_BOB, Variable.X_ALICE

    return Variable.P_BOB, Variable.P_ALICE


def alice_conditional_variances(channel, convention=VarianceConvention.QUADRATURE):
    """
    V(x_B|x_A) and V(p_B|p_A); both (1 + delta)/4
    in quadrature units whatever eta, V_A and theta

    :param channel: ChannelParams
    :param convention: VarianceConvention of the result
    :returns: (V(x_B|x_A), V(p_B|p_A))
    :rtype: tuple

    """

    moments = ensemble_moments(channel)

    return tuple(
        conditional_variance(moments, *_bob_alice(quad), convention=convention)
        for quad in Quadrature
    )


def epr_conditional_variance(
    moments, quadrature=Quadrature.X, convention=VarianceConvention.QUADRATURE
):
    """
    Conditional variance of Bob's quadrature given a homodyne
    measurement of the mode purifying Alice's Gaussian ensemble
    (the entanglement-based picture). The EPR partner is more
    strongly correlated than the classical amplitude by the
    factor (V_A + 2)/(V_A + 1) on the explained variance, giving
    (1 + delta) - eta V_A/(1 + V_A) in shot-noise units.

    :param moments: JointMoments
    :param quadrature: Quadrature.X or Quadrature.P
    :param convention: VarianceConvention of the result
    :returns:
    :rtype: float

    """

    bob, alice = _bob_alice(quadrature)

    var_alice = moments.variance(alice)

    v_a = 4.0 * var_alice

    explained = moments.covariance(bob, alice) ** 2 / var_alice

    residual = moments.variance(bob) - explained * (v_a + 2.0) / (v_a + 1.0)

    return convention.convert(residual)
