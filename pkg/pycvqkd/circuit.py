import collections
import logging

import numpy as np
import pandas as pd

from .errors import DomainError
from .quadrature import (MomentState, Mode, Quadrature, QuadIndex, bs_map,
                         compose, propagate, tms_map)

log = logging.getLogger(__name__)


def check_channel_domain(eta, delta):
    """
    The amplifier + beam splitter circuit only exists
    for 0 < eta <= 1 and 0 <= delta < 2 eta

    :param eta: line transmission
    :param delta: excess noise
    :returns:
    :rtype:

    """

    if not (np.isfinite(eta) and 0.0 < eta <= 1.0):

        raise DomainError(f"line transmission must satisfy 0 < eta <= 1, got eta={eta}")

    if not (np.isfinite(delta) and delta >= 0.0):

        raise DomainError(f"excess noise must satisfy delta >= 0, got delta={delta}")

    if delta >= 2.0 * eta:

        raise DomainError(
            f"cloning circuit requires delta < 2 eta, got delta={delta}, eta={eta}"
        )


class ChannelParams(object):
    def __init__(self, eta, delta, v_a):
        """
        The lossy and noisy line seen by Alice and Bob.

        :param eta: line transmission in (0, 1]
        :param delta: excess noise in shot-noise units, 0 <= delta < 2 eta
        :param v_a: Alice's modulation variance (> 0)
        :returns:
        :rtype:

        """

        check_channel_domain(eta, delta)

        if not (np.isfinite(v_a) and v_a > 0.0):

            raise DomainError(f"modulation variance must satisfy v_a > 0, got v_a={v_a}")

        self._eta = float(eta)
        self._delta = float(delta)
        self._v_a = float(v_a)

    @property
    def eta(self):
        return self._eta

    @property
    def delta(self):
        return self._delta

    @property
    def v_a(self):
        return self._v_a

    def as_dict(self):

        return dict(eta=self._eta, delta=self._delta, v_a=self._v_a)

    def __repr__(self):

        return f"ChannelParams(eta={self._eta!r}, delta={self._delta!r}, v_a={self._v_a!r})"


class CircuitParams(object):
    def __init__(self, squeezing, phi, theta=0.0):
        """
        Settings of Eve's circuit: the amplifier squeezing,
        the first beam splitter angle and her own
        beam splitter angle. Any finite theta is accepted,
        (-pi/2, pi/2] being the canonical range.

        :param squeezing: lambda >= 0, amplifier gain cosh^2(lambda)
        :param phi: first beam splitter angle in [0, pi/2)
        :param theta: Eve's beam splitter angle
        :returns:
        :rtype:

        """

        if not (np.isfinite(squeezing) and squeezing >= 0.0):

            raise DomainError(f"squeezing must be finite and >= 0, got {squeezing}")

        if not (np.isfinite(phi) and 0.0 <= phi < 0.5 * np.pi):

            raise DomainError(f"phi must lie in [0, pi/2), got {phi}")

        if not np.isfinite(theta):

            raise DomainError(f"theta must be finite, got {theta}")

        self._squeezing = float(squeezing)
        self._phi = float(phi)
        self._theta = float(theta)

    @classmethod
    def from_channel(cls, channel, theta=0.0):
        """
        the circuit that reproduces a given channel

        :param channel: ChannelParams (or anything with eta and delta)
        :param theta: Eve's beam splitter angle
        :returns:
        :rtype: CircuitParams

        """

        squeezing, phi = invert_channel(channel.eta, channel.delta)

        return cls(squeezing, phi, theta)

    @property
    def squeezing(self):
        return self._squeezing

    @property
    def phi(self):
        return self._phi

    @property
    def theta(self):
        return self._theta

    @property
    def gain(self):
        return np.cosh(self._squeezing) ** 2

    def with_theta(self, theta):

        return CircuitParams(self._squeezing, self._phi, theta)

    def __repr__(self):

        return (
            f"CircuitParams(squeezing={self._squeezing!r}, "
            f"phi={self._phi!r}, theta={self._theta!r})"
        )


class CoherentAmplitude(object):
    def __init__(self, re, im=0.0):
        """
        coherent amplitude alpha with x_alpha = re(alpha)
        and p_alpha = im(alpha) in quadrature units
        """

        self._re = float(re)
        self._im = float(im)

    @classmethod
    def from_complex(cls, alpha):

        alpha = complex(alpha)

        return cls(alpha.real, alpha.imag)

    @property
    def re(self):
        return self._re

    @property
    def im(self):
        return self._im

    @property
    def complex(self):
        return complex(self._re, self._im)

    def __repr__(self):

        return f"CoherentAmplitude({self._re!r}, {self._im!r})"


def invert_channel(eta, delta):
    """
    Circuit parameters that reproduce the channel:

    tan(phi) = sqrt((1 - eta + delta/2) / (eta - delta/2))
    tanh(lambda) = sqrt(delta / (2 eta))

    :param eta: line transmission
    :param delta: excess noise
    :returns: (squeezing, phi)
    :rtype: tuple

    """

    check_channel_domain(eta, delta)

    squeezing = float(np.arctanh(np.sqrt(0.5 * delta / eta)))

    phi = float(np.arctan2(np.sqrt(1.0 - eta + 0.5 * delta), np.sqrt(eta - 0.5 * delta)))

    log.debug(f"channel eta={eta}, delta={delta} -> lambda={squeezing}, phi={phi}")

    return squeezing, phi


def build_circuit(params):
    """
    The full attack circuit: amplifier on (a, c),
    then the beam splitter phi on (a, b), then
    Eve's beam splitter theta on (b, c)

    :param params: CircuitParams
    :returns:
    :rtype: SymplecticMap

    """

    amplifier = tms_map(Mode.A, Mode.C, params.squeezing)
    cloner = bs_map(Mode.A, Mode.B, params.phi)
    eve = bs_map(Mode.B, Mode.C, params.theta)

    return compose(eve, compose(cloner, amplifier))


def output_amplitudes(params, alpha):
    """
    Mean amplitudes of a'', b'' and c'' for a coherent
    input alpha on mode a and vacuum on b and c

    :param params: CircuitParams
    :param alpha: CoherentAmplitude
    :returns: (a'', b'', c'')
    :rtype: tuple of CoherentAmplitude

    """

    a = alpha.complex

    ch, sh = np.cosh(params.squeezing), np.sinh(params.squeezing)
    cp, sp = np.cos(params.phi), np.sin(params.phi)
    ct, st = np.cos(params.theta), np.sin(params.theta)

    a2 = a * ch * cp
    b2 = a * ch * ct * sp + a.conjugate() * sh * st
    c2 = a * ch * st * sp - a.conjugate() * sh * ct

    return tuple(CoherentAmplitude.from_complex(z) for z in (a2, b2, c2))


def verify_channel(params):
    """
    Measure the channel realised by a circuit: the
    amplitude transmission and the excess noise of x_a''
    when a fixed coherent state enters mode a

    :param params: CircuitParams
    :returns: (eta, delta)
    :rtype: tuple

    """

    eta = float((np.cosh(params.squeezing) * np.cos(params.phi)) ** 2)

    out = propagate(MomentState.vacuum(), build_circuit(params))

    delta = 4.0 * out.variance(QuadIndex(Mode.A, Quadrature.X)) - 1.0

    return eta, float(delta)


def circuit_table(params):
    """
    a small summary of the circuit settings
    """

    output = collections.OrderedDict()

    output["lambda"] = params.squeezing
    output["gain"] = params.gain
    output["phi"] = params.phi
    output["theta"] = params.theta

    return pd.Series(output)
