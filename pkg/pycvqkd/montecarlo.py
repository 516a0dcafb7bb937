"""
Round-by-round sampling of the prepare-and-measure protocol
under attack, as an independent check on the moment calculus.
"""

import collections
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import h5py
import numpy as np
import pandas as pd

from .attacks import AttackKind, attack_report, theta_opt
from .circuit import ChannelParams, CircuitParams, build_circuit
from .ensemble import VarianceConvention
from .errors import DomainError
from .homodyne_gen import homodyne_rounds, round_draws
from .quadrature import Mode, Quadrature, QuadIndex
from .utils.hdf5_utils import (recursively_load_dict_contents_from_group,
                               recursively_save_dict_contents_to_group)
from .utils.statistics import standard_error, two_sided_p_value, z_score

log = logging.getLogger(__name__)

MIN_SAMPLES = 1000
CHUNK_ROUNDS = 65536

# per-basis running sums: n, B, E, A, BB, EE, AA, BE, BA
_N, _B, _E, _A, _BB, _EE, _AA, _BE, _BA = range(9)


class SimConfig(object):
    def __init__(self, channel, kind, samples, seed, workers=1):
        """
        Settings of one Monte Carlo run

        :param channel: ChannelParams
        :param kind: AttackKind
        :param samples: number of rounds (>= 1000)
        :param seed: 64-bit unsigned key
        :param workers: threads evaluating chunks of rounds
        :returns:
        :rtype:

        """

        if int(samples) != samples or samples < MIN_SAMPLES:

            raise DomainError(
                f"samples must be an integer >= {MIN_SAMPLES}, got samples={samples}"
            )

        if int(seed) != seed or not 0 <= seed < 2 ** 64:

            raise DomainError(f"seed must be a 64-bit unsigned integer, got seed={seed}")

        if workers < 1:

            raise DomainError(f"workers must be >= 1, got workers={workers}")

        self._channel = channel
        self._kind = AttackKind(kind)
        self._samples = int(samples)
        self._seed = int(seed)
        self._workers = int(workers)

    @property
    def channel(self):
        return self._channel

    @property
    def kind(self):
        return self._kind

    @property
    def samples(self):
        return self._samples

    @property
    def seed(self):
        return self._seed

    @property
    def workers(self):
        return self._workers

    @property
    def n_chunks(self):
        return -(-self._samples // CHUNK_ROUNDS)


class EveMeasurement(object):
    def __init__(self, x_row, p_row, theta_x, theta_p, simultaneous):
        """
        Which output quadrature Eve reads in each of Bob's bases
        and the angle her beam splitter is set to for it.
        Reading x and p of the same mode within a round is
        forbidden, so only distinct modes may be simultaneous.

        :param x_row: QuadIndex read when Bob measured x
        :param p_row: QuadIndex read when Bob measured p
        :param theta_x: Eve's angle for the x reading
        :param theta_p: Eve's angle for the p reading
        :param simultaneous: both are measured in every round
        :returns:
        :rtype:

        """

        assert x_row.quadrature is Quadrature.X and p_row.quadrature is Quadrature.P

        if simultaneous:

            assert x_row.mode != p_row.mode, "x and p of one mode in the same round"

        self._x_row = x_row
        self._p_row = p_row
        self._theta_x = float(theta_x)
        self._theta_p = float(theta_p)
        self._simultaneous = simultaneous

    @property
    def x_row(self):
        return self._x_row

    @property
    def p_row(self):
        return self._p_row

    @property
    def theta_x(self):
        return self._theta_x

    @property
    def theta_p(self):
        return self._theta_p

    @property
    def simultaneous(self):
        return self._simultaneous

    @property
    def touched(self):
        """
        every output quadrature Eve measures in some round
        """

        return {self._x_row, self._p_row}


def eve_rows(kind, channel):
    """
    Eve's measurement plan for an attack

    :param kind: AttackKind
    :param channel: ChannelParams
    :returns:
    :rtype: EveMeasurement

    """

    x_b = QuadIndex(Mode.B, Quadrature.X)
    p_b = QuadIndex(Mode.B, Quadrature.P)
    x_c = QuadIndex(Mode.C, Quadrature.X)
    p_c = QuadIndex(Mode.C, Quadrature.P)

    if kind is AttackKind.CLONING:

        return EveMeasurement(x_b, p_b, 0.0, 0.0, simultaneous=False)

    if kind is AttackKind.ANTICLONING:

        return EveMeasurement(x_c, p_c, 0.0, 0.0, simultaneous=False)

    if kind is AttackKind.BELL_MEASUREMENT:

        quarter = 0.25 * np.pi

        return EveMeasurement(x_b, p_c, quarter, quarter, simultaneous=True)

    theta = theta_opt(channel.eta, channel.delta, channel.v_a)

    return EveMeasurement(x_b, p_b, theta, -theta, simultaneous=False)


def _basis_sums(alice, bob, eve):

    return np.array(
        [
            alice.shape[0],
            np.sum(bob),
            np.sum(eve),
            np.sum(alice),
            np.sum(bob * bob),
            np.sum(eve * eve),
            np.sum(alice * alice),
            np.sum(bob * eve),
            np.sum(bob * alice),
        ],
        dtype=np.float64,
    )


def _chunk_sums(config, rows, chunk):
    """
    sums over one fixed chunk of rounds, shape (2, 9)
    with row 0 for x rounds and row 1 for p rounds
    """

    first = chunk * CHUNK_ROUNDS
    n_rounds = min(CHUNK_ROUNDS, config.samples - first)

    log.debug(f"chunk {chunk}: rounds {first} to {first + n_rounds - 1}")

    normals, coins = round_draws(config.seed, first, n_rounds)

    alice, bob, eve = homodyne_rounds(
        normals,
        coins,
        rows["bob_x"],
        rows["bob_p"],
        rows["eve_x"],
        rows["eve_p"],
        np.sqrt(0.25 * config.channel.v_a),
        rows["simultaneous"],
    )

    return np.stack(
        [_basis_sums(alice[coins == b], bob[coins == b], eve[coins == b]) for b in (0, 1)]
    )


def _residual(sums, target, given, target_sq, given_sq, cross):

    n = sums[_N]

    mean_t = sums[target] / n
    mean_g = sums[given] / n

    var_t = sums[target_sq] / n - mean_t ** 2
    var_g = sums[given_sq] / n - mean_g ** 2
    cov = sums[cross] / n - mean_t * mean_g

    if var_g <= 0.0:

        log.warning("degenerate conditioning variable in the sample")

        return max(var_t, 0.0)

    return max(var_t - cov ** 2 / var_g, 0.0)


def run_simulation(config):
    """
    Sample config.samples protocol rounds and estimate the
    conditional variances of Bob's outcome given Alice's
    amplitude and given Eve's outcome, in quadrature units.
    Rounds are split into fixed chunks, so the result does
    not depend on config.workers.

    :param config: SimConfig
    :returns:
    :rtype: EmpiricalReport

    """

    channel = config.channel

    plan = eve_rows(config.kind, channel)

    M_x = build_circuit(CircuitParams.from_channel(channel, plan.theta_x))
    M_p = build_circuit(CircuitParams.from_channel(channel, plan.theta_p))

    rows = dict(
        bob_x=M_x.row(QuadIndex(Mode.A, Quadrature.X)),
        bob_p=M_p.row(QuadIndex(Mode.A, Quadrature.P)),
        eve_x=M_x.row(plan.x_row),
        eve_p=M_p.row(plan.p_row),
        simultaneous=plan.simultaneous,
    )

    log.info(
        f"sampling {config.samples} rounds of the {config.kind.value} attack "
        f"on {channel} in {config.n_chunks} chunks"
    )

    chunks = range(config.n_chunks)

    if config.workers > 1:

        with ThreadPoolExecutor(max_workers=config.workers) as pool:

            partial = list(pool.map(lambda k: _chunk_sums(config, rows, k), chunks))

    else:

        partial = [_chunk_sums(config, rows, k) for k in chunks]

    partial = np.stack(partial)

    # exact, order independent combination of the chunk sums
    sums = np.array(
        [[math.fsum(partial[:, b, k]) for k in range(9)] for b in (0, 1)]
    )

    pooled = np.array([math.fsum(sums[:, k]) for k in range(9)])

    v_ba_hat = _residual(pooled, _B, _A, _BB, _AA, _BA)
    v_be_x_hat = _residual(sums[0], _B, _E, _BB, _EE, _BE)
    v_be_p_hat = _residual(sums[1], _B, _E, _BB, _EE, _BE)

    n_x, n_p = int(sums[0, _N]), int(sums[1, _N])

    if min(n_x, n_p) < 2:

        raise DomainError("too few sifted rounds in one basis to estimate a variance")

    se = dict(
        v_ba=standard_error(v_ba_hat, config.samples),
        v_be_x=standard_error(v_be_x_hat, n_x),
        v_be_p=standard_error(v_be_p_hat, n_p),
    )

    log.info(f"finished {config.samples} rounds ({n_x} x, {n_p} p)")

    return EmpiricalReport(
        v_ba_hat,
        v_be_x_hat,
        v_be_p_hat,
        se,
        config.samples,
        (n_x, n_p),
        dict(
            kind=config.kind.value,
            eta=channel.eta,
            delta=channel.delta,
            v_a=channel.v_a,
            seed=config.seed,
        ),
    )


class EmpiricalReport(object):
    def __init__(self, v_ba_hat, v_be_x_hat, v_be_p_hat, se, samples, sifted, settings):
        """
        Empirical conditional variances of one run in
        quadrature units, with their standard errors

        :param v_ba_hat: V(B|A), both bases pooled
        :param v_be_x_hat: V(x_B|x_E) over x rounds
        :param v_be_p_hat: V(p_B|p_E) over p rounds
        :param se: dict of standard errors keyed v_ba, v_be_x, v_be_p
        :param samples: number of rounds
        :param sifted: (x rounds, p rounds)
        :param settings: dict with kind, eta, delta, v_a, seed
        :returns:
        :rtype:

        """

        assert min(v_ba_hat, v_be_x_hat, v_be_p_hat) >= 0, "negative variance estimate"

        self._v_ba_hat = float(v_ba_hat)
        self._v_be_x_hat = float(v_be_x_hat)
        self._v_be_p_hat = float(v_be_p_hat)
        self._se = {k: float(v) for k, v in se.items()}
        self._samples = int(samples)
        self._sifted = tuple(int(n) for n in sifted)
        self._settings = dict(settings)

    @property
    def v_ba_hat(self):
        return self._v_ba_hat

    @property
    def v_be_x_hat(self):
        return self._v_be_x_hat

    @property
    def v_be_p_hat(self):
        return self._v_be_p_hat

    @property
    def se(self):
        return dict(self._se)

    @property
    def samples(self):
        return self._samples

    @property
    def sifted(self):
        return self._sifted

    @property
    def settings(self):
        return dict(self._settings)

    @property
    def kind(self):
        return AttackKind(self._settings["kind"])

    @property
    def channel(self):

        return ChannelParams(
            self._settings["eta"], self._settings["delta"], self._settings["v_a"]
        )

    def comparison(self, analytic=None):
        """
        empirical against analytic values with z-scores
        and two-sided p-values

        :param analytic: AttackReport; evaluated from the run settings if None
        :returns:
        :rtype: pd.DataFrame

        """

        if analytic is None:

            analytic = attack_report(self.kind, self.channel)

        analytic = analytic.in_convention(VarianceConvention.QUADRATURE)

        rows = []

        for name, empirical, expected in (
            ("v_ba", self._v_ba_hat, analytic.v_ba),
            ("v_be_x", self._v_be_x_hat, analytic.v_be_x),
            ("v_be_p", self._v_be_p_hat, analytic.v_be_p),
        ):

            z = z_score(empirical, expected, self._se[name])

            rows.append(
                dict(
                    quantity=name,
                    empirical=empirical,
                    analytic=expected,
                    se=self._se[name],
                    z=z,
                    p_value=float(two_sided_p_value(z)),
                )
            )

        return pd.DataFrame(rows).set_index("quantity")

    @property
    def table(self):

        output = collections.OrderedDict()

        output["attack"] = self._settings["kind"]
        output["eta"] = self._settings["eta"]
        output["delta"] = self._settings["delta"]
        output["V_A"] = self._settings["v_a"]
        output["seed"] = self._settings["seed"]
        output["samples"] = self._samples
        output["x rounds"] = self._sifted[0]
        output["p rounds"] = self._sifted[1]
        output["V(B|A)"] = self._v_ba_hat
        output["V(x_B|x_E)"] = self._v_be_x_hat
        output["V(p_B|p_E)"] = self._v_be_p_hat

        return pd.Series(output)

    def as_dict(self):

        return dict(
            v_ba_hat=self._v_ba_hat,
            v_be_x_hat=self._v_be_x_hat,
            v_be_p_hat=self._v_be_p_hat,
            se=dict(self._se),
            samples=self._samples,
            sifted=dict(x=self._sifted[0], p=self._sifted[1]),
            settings=dict(self._settings),
        )

    def write_to(self, file_name):
        """
        save the report to an HDF5 file

        :param file_name:
        :returns:
        :rtype:

        """

        with h5py.File(file_name, "w") as f:

            recursively_save_dict_contents_to_group(f, "report", self.as_dict())

    @classmethod
    def from_file(cls, file_name):

        with h5py.File(file_name, "r") as f:

            d = recursively_load_dict_contents_from_group(f, "report")

        settings = d["settings"]

        settings = dict(
            kind=str(settings["kind"]),
            eta=float(settings["eta"]),
            delta=float(settings["delta"]),
            v_a=float(settings["v_a"]),
            seed=int(settings["seed"]),
        )

        return cls(
            d["v_ba_hat"],
            d["v_be_x_hat"],
            d["v_be_p_hat"],
            d["se"],
            d["samples"],
            (d["sifted"]["x"], d["sifted"]["p"]),
            settings,
        )
