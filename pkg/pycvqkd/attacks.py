"""
Eve's conditional variance for the attack circuit, the four
individual attacks built on it and their security thresholds.

All closed forms are evaluated in shot-noise units (vacuum = 1)
and converted at the boundary. The security criterion is
V(x_B|x_A) <= V(x_B|x_E) for both quadratures.
"""

import collections
import enum
import logging
from concurrent.futures import ThreadPoolExecutor

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
from scipy.optimize import bisect, minimize_scalar

from .circuit import (ChannelParams, CircuitParams, build_circuit,
                      check_channel_domain, output_amplitudes)
from .ensemble import (VarianceConvention, ensemble_moments,
                       epr_conditional_variance)
from .errors import DomainError
from .io.plotting.threshold_plot import draw_threshold_curves
from .quadrature import Mode, Quadrature, QuadIndex

log = logging.getLogger(__name__)

HALF_PI = 0.5 * np.pi

THRESHOLD_COLUMNS = (
    "delta",
    "eta_clone",
    "eta_anticlone",
    "eta_bma",
    "eta_opt",
    "eta_intercept_resend",
)


class AttackKind(enum.Enum):
    CLONING = "clone"
    ANTICLONING = "anticlone"
    BELL_MEASUREMENT = "bma"
    OPTIMAL = "optimal"

    @property
    def column(self):
        """
        name of this attack's column in a threshold curve
        """

        return {
            AttackKind.CLONING: "eta_clone",
            AttackKind.ANTICLONING: "eta_anticlone",
            AttackKind.BELL_MEASUREMENT: "eta_bma",
            AttackKind.OPTIMAL: "eta_opt",
        }[self]

    @property
    def delayed_choice(self):
        """
        whether Eve waits for Bob's basis before measuring
        """

        return self is not AttackKind.BELL_MEASUREMENT


class XYZCoefficients(object):
    def __init__(self, x_coef, y_coef, z_coef):
        """
        expansion x_b''(theta) = X x_a + Y x_b + Z x_c
        """

        self._x = float(x_coef)
        self._y = float(y_coef)
        self._z = float(z_coef)

    @property
    def x_coef(self):
        return self._x

    @property
    def y_coef(self):
        return self._y

    @property
    def z_coef(self):
        return self._z

    def as_array(self):

        return np.array([self._x, self._y, self._z])

    def __repr__(self):

        return f"XYZCoefficients({self._x!r}, {self._y!r}, {self._z!r})"


class Threshold(float):
    """
    A line-transmission threshold. Values above one, and the
    infinite threshold of an attack with no root, are kept as
    they are and marked unreachable: no physical line is secure
    against that attack.
    """

    def __new__(cls, value):

        return super(Threshold, cls).__new__(cls, value)

    @property
    def unreachable(self):
        return not float(self) <= 1.0


def _check_modulation(v_a):

    if not (np.isfinite(v_a) and v_a > 0.0):

        raise DomainError(f"modulation variance must satisfy v_a > 0, got v_a={v_a}")


def _xyz(theta, eta, delta):

    root = np.sqrt(eta - 0.5 * delta)
    s1 = np.sqrt(1.0 - eta + 0.5 * delta)
    s2 = np.sqrt(0.5 * delta)

    c, s = np.cos(theta), np.sin(theta)

    x_coef = (np.sqrt(eta) * s1 * c + s2 * s) / root
    y_coef = root * c
    z_coef = -(np.sqrt(eta) * s + s2 * s1 * c) / root

    return x_coef, y_coef, z_coef


def xyz(theta, eta, delta):
    """
    coefficients of x_a, x_b and x_c in Eve's
    quadrature x_b''(theta)

    :param theta: Eve's beam splitter angle
    :param eta: line transmission
    :param delta: excess noise
    :returns:
    :rtype: XYZCoefficients

    """

    check_channel_domain(eta, delta)

    return XYZCoefficients(*_xyz(theta, eta, delta))


def _v_be_snu(theta, eta, delta, v_a):

    x_coef, y_coef, z_coef = _xyz(theta, eta, delta)

    omega = (
        x_coef
        - y_coef * np.sqrt((1.0 - eta + 0.5 * delta) / eta)
        - z_coef * np.sqrt(0.5 * delta / eta)
    )

    norm = x_coef ** 2 + y_coef ** 2 + z_coef ** 2

    denominator = (v_a + 1.0) * x_coef ** 2 + y_coef ** 2 + z_coef ** 2

    return 1.0 + delta + eta * (v_a * (norm - 2.0 * x_coef * omega) - omega ** 2) / denominator


def v_be(theta, eta, delta, v_a, convention=VarianceConvention.SHOT_NOISE):
    """
    Eve's conditional variance V(x_a''|x_b''(theta)).
    theta may be an array.

    :param theta: Eve's beam splitter angle
    :param eta: line transmission
    :param delta: excess noise
    :param v_a: modulation variance
    :param convention: VarianceConvention of the result
    :returns:
    :rtype: float or np.ndarray

    """

    check_channel_domain(eta, delta)
    _check_modulation(v_a)

    snu = _v_be_snu(theta, eta, delta, v_a)

    return 0.25 * convention.scale * snu


def v_be_symmetries(theta, eta, delta, v_a, convention=VarianceConvention.SHOT_NOISE):
    """
    Eve's four single-quadrature options at a given theta.
    Swapping b'' for c'' shifts theta by -pi/2 and the
    momentum quadratures see theta reflected:

    V(x_B|x_b''(t)) = V_BE(t),        V(x_B|x_c''(t)) = V_BE(t - pi/2)
    V(p_B|p_b''(t)) = V_BE(-t),       V(p_B|p_c''(t)) = V_BE(pi/2 - t)

    :returns: (x given b'', x given c'', p given b'', p given c'')
    :rtype: tuple

    """

    return tuple(
        v_be(angle, eta, delta, v_a, convention)
        for angle in (theta, theta - HALF_PI, -theta, HALF_PI - theta)
    )


def closed_form_v_be(kind, eta, delta, v_a):
    """
    Eve's conditional variance for each attack in
    shot-noise units, from the per-attack closed forms.

    :param kind: AttackKind
    :param eta: line transmission
    :param delta: excess noise
    :param v_a: modulation variance
    :returns:
    :rtype: float

    """

    check_channel_domain(eta, delta)
    _check_modulation(v_a)

    if kind is AttackKind.CLONING:

        return (delta + 2.0 * (1.0 + v_a) * eta) / (
            delta ** 2
            + delta * (1.0 + (v_a - 2.0) * eta)
            + 2.0 * eta * (1.0 + v_a * (1.0 - eta))
        )

    if kind is AttackKind.ANTICLONING:

        return 1.0 + delta - eta * ((4.0 + 3.0 * v_a) * delta - 2.0 * v_a * eta) / (
            (1.0 + v_a) * delta + 2.0 * eta
        )

    if kind is AttackKind.BELL_MEASUREMENT:

        denominator = (
            delta ** 2
            + 2.0 * (v_a + 2.0) * np.sqrt(2.0 * eta * delta * (1.0 - eta + 0.5 * delta))
            + delta * (v_a + 2.0 + (v_a - 2.0) * eta)
            + 2.0 * eta * (2.0 + v_a * (1.0 - eta))
        )

        return 1.0 + v_a * (2.0 * eta - delta) ** 2 / denominator

    return (1.0 + v_a) / ((1.0 + v_a) * (1.0 + delta) - eta * v_a)


def minimize_v_be(eta, delta, v_a, n_grid=721):
    """
    Numerical minimum of V_BE over Eve's angle. The best
    point of a grid spanning (-pi/2, pi/2] seeds a bounded
    scalar minimisation over the neighbouring grid cells.

    :param eta: line transmission
    :param delta: excess noise
    :param v_a: modulation variance
    :param n_grid: number of grid points
    :returns: (theta, v_be in shot-noise units)
    :rtype: tuple

    """

    check_channel_domain(eta, delta)
    _check_modulation(v_a)

    grid = np.linspace(-HALF_PI, HALF_PI, n_grid)

    values = _v_be_snu(grid, eta, delta, v_a)

    best = int(np.argmin(values))

    step = grid[1] - grid[0]

    result = minimize_scalar(
        lambda theta: _v_be_snu(theta, eta, delta, v_a),
        bounds=(grid[best] - step, grid[best] + step),
        method="bounded",
        options=dict(xatol=1e-12),
    )

    theta = float(result.x)

    if result.fun > values[best]:

        theta = float(grid[best])

    # V_BE has period pi in theta
    theta = theta - np.pi * np.round(theta / np.pi)

    if theta <= -HALF_PI:

        theta += np.pi

    return theta, float(_v_be_snu(theta, eta, delta, v_a))


def theta_opt(eta, delta, v_a, verify=True):
    """
    Eve's optimal beam splitter angle,

    tan(theta) = sqrt(eta delta)(2 + V_A) / (sqrt(2 - 2 eta + delta) {V_A(eta - delta) - delta})

    on the principal branch. With verify, the angle is checked
    against minimize_v_be; if the minimiser does better it wins
    and a diagnostic is logged.

    :param eta: line transmission
    :param delta: excess noise
    :param v_a: modulation variance
    :param verify: cross-check against the numerical minimum
    :returns:
    :rtype: float

    """

    check_channel_domain(eta, delta)
    _check_modulation(v_a)

    if delta == 0.0:

        # the anticlone is vacuum: plain cloning attack
        return 0.0

    numerator = np.sqrt(eta * delta) * (2.0 + v_a)
    denominator = np.sqrt(2.0 - 2.0 * eta + delta) * (v_a * (eta - delta) - delta)

    if denominator == 0.0:

        theta = HALF_PI

    else:

        theta = float(np.arctan(numerator / denominator))

    if verify:

        theta_num, v_num = minimize_v_be(eta, delta, v_a)

        v_closed = float(_v_be_snu(theta, eta, delta, v_a))

        if v_num < v_closed - 1e-12 * max(1.0, abs(v_closed)):

            log.warning(
                f"closed-form theta_opt={theta} (V={v_closed}) loses to the minimiser "
                f"theta={theta_num} (V={v_num}) at eta={eta}, delta={delta}, v_a={v_a}"
            )

            theta = theta_num

    return theta


def _attack_angles(kind, eta, delta, v_a):
    """
    the arguments of V_BE that give Eve's x and p
    conditional variances for each attack
    """

    if kind is AttackKind.CLONING:

        # b' = b''(0) for both quadratures
        return 0.0, 0.0, 0.0

    if kind is AttackKind.ANTICLONING:

        # c' = c''(0): x at 0 - pi/2, p at pi/2 - 0
        return HALF_PI, -HALF_PI, HALF_PI

    if kind is AttackKind.BELL_MEASUREMENT:

        # x of b''(pi/4) and p of c''(pi/4)
        quarter = 0.25 * np.pi

        return quarter, quarter, HALF_PI - quarter

    theta = theta_opt(eta, delta, v_a)

    # x of b''(theta_opt), p of b''(-theta_opt)
    return theta, theta, theta


def threshold(kind, delta, v_a):
    """
    Smallest line transmission at which the channel is
    secure against an attack.

    :param kind: AttackKind
    :param delta: excess noise
    :param v_a: modulation variance
    :returns:
    :rtype: Threshold

    """

    if not (np.isfinite(delta) and delta >= 0.0):

        raise DomainError(f"excess noise must satisfy delta >= 0, got delta={delta}")

    _check_modulation(v_a)

    if kind is AttackKind.CLONING:

        value = (
            delta
            / (4.0 * v_a * (1.0 + delta))
            * (
                (3.0 + delta) * v_a
                - 2.0 * delta
                + np.sqrt(((3.0 + delta) * v_a + 2.0 * delta) ** 2 + 16.0 * v_a)
            )
        )

    elif kind is AttackKind.ANTICLONING:

        value = (4.0 + 3.0 * v_a) * delta / (2.0 * v_a)

    elif kind is AttackKind.BELL_MEASUREMENT and v_a < delta:

        # no real root: V(B|E) stays below 1 + delta on the whole line
        value = np.inf

    elif kind is AttackKind.BELL_MEASUREMENT:

        value = (
            2.0
            * delta
            * (v_a + 1.0 - 0.5 * delta + np.sqrt((v_a + 2.0) * (v_a - delta)))
            / (v_a * (2.0 + delta))
        )

    else:

        value = (1.0 + v_a) / v_a * delta * (2.0 + delta) / (1.0 + delta)

    value = Threshold(value)

    if value.unreachable:

        log.warning(
            f"{kind.value} threshold {float(value)} > 1 at delta={delta}, v_a={v_a}: "
            "channel cannot be secure at any transmission"
        )

    return value


def threshold_by_bisection(kind, delta, v_a, xtol=1e-15):
    """
    Root of closed_form_v_be(kind, eta) = 1 + delta in eta,
    searched on (delta/2, 1].

    :param kind: AttackKind
    :param delta: excess noise
    :param v_a: modulation variance
    :param xtol: absolute tolerance on eta
    :returns: the root, or None when it is not bracketed
    :rtype: float

    """

    _check_modulation(v_a)

    if delta == 0.0:

        return 0.0

    def gap(eta):

        return closed_form_v_be(kind, eta, delta, v_a) - (1.0 + delta)

    low = 0.5 * delta * (1.0 + 1e-12)
    high = 1.0

    if low >= high or gap(high) < 0.0 or gap(low) >= 0.0:

        log.debug(f"no {kind.value} threshold in (delta/2, 1] for delta={delta}, v_a={v_a}")

        return None

    return float(bisect(gap, low, high, xtol=xtol, maxiter=400))


def intercept_resend_bound(delta):
    """
    necessary condition for any secure key with
    coherent states: eta > delta / 2
    """

    if not (np.isfinite(delta) and delta >= 0.0):

        raise DomainError(f"excess noise must satisfy delta >= 0, got delta={delta}")

    return 0.5 * delta


def high_modulation_limits(eta, delta):
    """
    Limits of the optimal attack as V_A -> infinity

    V_BE(theta_opt) -> 1 / (1 + delta - eta)
    theta_opt -> arctan(sqrt(eta delta) / (sqrt(2 - 2 eta + delta)(eta - delta)))

    At eta = delta the angle sits on the pi/2 boundary,
    which is returned and logged.

    :param eta: line transmission
    :param delta: excess noise
    :returns: (v_be limit in shot-noise units, theta limit)
    :rtype: tuple

    """

    check_channel_domain(eta, delta)

    headroom = 1.0 + delta - eta

    v_limit = np.inf if headroom == 0.0 else 1.0 / headroom

    if eta == delta:

        log.warning(f"theta_opt limit at eta = delta = {eta} is the pi/2 boundary")

        return v_limit, HALF_PI

    theta_limit = float(
        np.arctan(np.sqrt(eta * delta) / (np.sqrt(2.0 - 2.0 * eta + delta) * (eta - delta)))
    )

    return v_limit, theta_limit


def _json_number(value):
    """
    non-finite values have no JSON literal; they are written as null
    """

    value = float(value)

    return value if np.isfinite(value) else None


class AttackReport(object):
    def __init__(
        self,
        kind,
        channel,
        theta,
        v_be_x,
        v_be_p,
        v_ba,
        threshold_eta,
        convention=VarianceConvention.SHOT_NOISE,
    ):
        """
        The outcome of one attack on one channel.

        :param kind: AttackKind
        :param channel: ChannelParams
        :param theta: the angle Eve sets on her beam splitter
        :param v_be_x: Eve's conditional variance, position
        :param v_be_p: Eve's conditional variance, momentum
        :param v_ba: Alice's conditional variance
        :param threshold_eta: the attack's eta threshold
        :param convention: VarianceConvention of the variances
        :returns:
        :rtype:

        """

        self._kind = kind
        self._channel = channel
        self._theta = float(theta)
        self._v_be_x = float(v_be_x)
        self._v_be_p = float(v_be_p)
        self._v_ba = float(v_ba)
        self._threshold_eta = threshold_eta
        self._convention = convention

    @property
    def kind(self):
        return self._kind

    @property
    def channel(self):
        return self._channel

    @property
    def theta(self):
        return self._theta

    @property
    def v_be_x(self):
        return self._v_be_x

    @property
    def v_be_p(self):
        return self._v_be_p

    @property
    def v_ba(self):
        return self._v_ba

    @property
    def convention(self):
        return self._convention

    @property
    def threshold_eta(self):
        return self._threshold_eta

    @property
    def secure(self):
        """
        V(B|A) - V(B|E) <= 0 in both quadratures
        """

        return self._v_ba <= min(self._v_be_x, self._v_be_p)

    @property
    def margin(self):
        """
        min(V(B|E)) - V(B|A) in shot-noise units,
        positive on the secure side
        """

        return (min(self._v_be_x, self._v_be_p) - self._v_ba) * 4.0 / self._convention.scale

    def in_convention(self, convention):

        factor = convention.scale / self._convention.scale

        return AttackReport(
            self._kind,
            self._channel,
            self._theta,
            self._v_be_x * factor,
            self._v_be_p * factor,
            self._v_ba * factor,
            self._threshold_eta,
            convention,
        )

    def as_dict(self):
        """
        the machine-readable form written by the CLI
        """

        snu = self.in_convention(VarianceConvention.SHOT_NOISE)

        return dict(
            kind=self._kind.value,
            eta=self._channel.eta,
            delta=self._channel.delta,
            v_a=self._channel.v_a,
            theta=self._theta,
            v_ba_snu=snu.v_ba,
            v_be_x_snu=snu.v_be_x,
            v_be_p_snu=snu.v_be_p,
            threshold_eta=_json_number(self._threshold_eta),
            secure=self.secure,
        )

    @property
    def table(self):

        output = collections.OrderedDict()

        output["attack"] = self._kind.value
        output["eta"] = self._channel.eta
        output["delta"] = self._channel.delta
        output["V_A"] = self._channel.v_a
        output["theta"] = self._theta
        output["V(B|A)"] = self._v_ba
        output["V(x_B|x_E)"] = self._v_be_x
        output["V(p_B|p_E)"] = self._v_be_p
        output["units"] = self._convention.value
        output["eta threshold"] = float(self._threshold_eta)
        output["unreachable"] = bool(getattr(self._threshold_eta, "unreachable", False))
        output["secure"] = self.secure

        return pd.Series(output)


def attack_report(kind, channel, convention=VarianceConvention.SHOT_NOISE):
    """
    Evaluate one attack on a channel.

    :param kind: AttackKind
    :param channel: ChannelParams
    :param convention: VarianceConvention of the report
    :returns:
    :rtype: AttackReport

    """

    eta, delta, v_a = channel.eta, channel.delta, channel.v_a

    theta, theta_x, theta_p = _attack_angles(kind, eta, delta, v_a)

    v_be_x = v_be(theta_x, eta, delta, v_a, convention)
    v_be_p = v_be(theta_p, eta, delta, v_a, convention)

    v_ba = convention.convert(0.25 * (1.0 + delta))

    report = AttackReport(
        kind,
        channel,
        theta,
        v_be_x,
        v_be_p,
        v_ba,
        threshold(kind, delta, v_a),
        convention,
    )

    log.debug(f"{kind.value} attack on {channel}: secure={report.secure}")

    return report


def heisenberg_product(channel):
    """
    V(x_B|A_EPR) V(p_B|p_E) at theta_opt in shot-noise units;
    one when the optimal attack saturates the uncertainty relation
    """

    moments = ensemble_moments(channel)

    v_epr = epr_conditional_variance(
        moments, Quadrature.X, convention=VarianceConvention.SHOT_NOISE
    )

    theta = theta_opt(channel.eta, channel.delta, channel.v_a)

    # p of b''(-theta_opt)
    v_eve = v_be(theta, channel.eta, channel.delta, channel.v_a)

    return v_epr * v_eve


def amplitude_ratio(channel, alpha):
    """
    |<b'>/<c'>| for a coherent input, the clone
    versus anticlone amplitude

    :param channel: ChannelParams
    :param alpha: CoherentAmplitude, nonzero
    :returns:
    :rtype: float

    """

    params = CircuitParams.from_channel(channel, theta=0.0)

    _, clone, anticlone = output_amplitudes(params, alpha)

    if anticlone.complex == 0:

        return np.inf

    return abs(clone.complex) / abs(anticlone.complex)


def bell_duplication(channel):
    """
    coefficients of x_a in x_b''(pi/4) and of p_a in p_c''(pi/4)
    """

    M = build_circuit(CircuitParams.from_channel(channel, theta=0.25 * np.pi))

    x_a = QuadIndex(Mode.A, Quadrature.X).position
    p_a = QuadIndex(Mode.A, Quadrature.P).position

    x_clone = M.row(QuadIndex(Mode.B, Quadrature.X))[x_a]
    p_anticlone = M.row(QuadIndex(Mode.C, Quadrature.P))[p_a]

    return float(x_clone), float(p_anticlone)


def ordering_holds(row):
    """
    whether eta_opt >= eta_bma >= eta_anticlone >= eta_clone
    for one threshold-curve row (a mapping by column name)
    """

    return bool(
        row["eta_opt"] >= row["eta_bma"]
        and row["eta_bma"] >= row["eta_anticlone"]
        and row["eta_anticlone"] >= row["eta_clone"]
    )


def _threshold_row(delta, v_a):

    return (float(delta),) + tuple(
        float(threshold(kind, delta, v_a)) for kind in AttackKind
    ) + (intercept_resend_bound(delta),)


class ThresholdCurve(object):
    def __init__(self, v_a, rows):
        """
        Security thresholds of all attacks against excess noise
        at fixed modulation, one row per delta in THRESHOLD_COLUMNS
        order.

        :param v_a: modulation variance
        :param rows: (n, 6) array
        :returns:
        :rtype:

        """

        rows = np.array(rows, dtype=np.float64).reshape(-1, len(THRESHOLD_COLUMNS))

        assert np.all(np.diff(rows[:, 0]) >= 0), "rows must be ordered by delta"

        rows.setflags(write=False)

        self._v_a = float(v_a)
        self._rows = rows

    @property
    def v_a(self):
        return self._v_a

    @property
    def rows(self):
        return self._rows

    @property
    def n_rows(self):
        return self._rows.shape[0]

    @property
    def deltas(self):
        return self._rows[:, 0]

    def column(self, name):

        return self._rows[:, THRESHOLD_COLUMNS.index(name)]

    def to_dataframe(self):

        return pd.DataFrame(self._rows, columns=THRESHOLD_COLUMNS)

    def ordering_holds(self):
        """
        per-row check of the attack ordering
        """

        return np.array([ordering_holds(row) for _, row in self.to_dataframe().iterrows()])

    def unreachable(self):
        """
        per-row, per-attack mask of thresholds above one
        """

        return self._rows[:, 1:5] > 1.0

    def display(self, ax=None, **kwargs):
        """
        plot the curves with delta horizontal and eta vertical

        :param ax: optional matplotlib axis
        :returns:
        :rtype: matplotlib figure

        """

        if ax is None:

            fig, ax = plt.subplots()

        else:

            fig = ax.get_figure()

        draw_threshold_curves(ax, self.deltas, {c: self.column(c) for c in THRESHOLD_COLUMNS[1:]}, **kwargs)

        return fig


def threshold_curve(v_a, delta_grid, workers=1):
    """
    Thresholds of every attack along a grid of excess noise.
    Rows may be evaluated concurrently; the output keeps
    ascending delta order.

    :param v_a: modulation variance
    :param delta_grid: iterable of delta >= 0
    :param workers: number of threads
    :returns:
    :rtype: ThresholdCurve

    """

    _check_modulation(v_a)

    deltas = np.sort(np.asarray(list(delta_grid), dtype=np.float64))

    if np.any(deltas < 0) or not np.all(np.isfinite(deltas)):

        raise DomainError("excess noise grid values must be finite and >= 0")

    if workers > 1:

        with ThreadPoolExecutor(max_workers=workers) as pool:

            rows = list(pool.map(lambda d: _threshold_row(d, v_a), deltas))

    else:

        rows = [_threshold_row(d, v_a) for d in deltas]

    return ThresholdCurve(v_a, rows)


def security_margin(kind, channel):
    """
    min(V(B|E)) - V(B|A) in shot-noise units for one
    attack; positive means the channel is secure
    """

    return attack_report(kind, channel).margin
