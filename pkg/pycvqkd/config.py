import logging

import numpy as np
import yaml

from .attacks import AttackKind
from .circuit import ChannelParams
from .errors import DomainError, MalformedDataError
from .montecarlo import SimConfig

log = logging.getLogger(__name__)

DEFAULT_SEED = 1234
DEFAULT_WORKERS = 1
DEFAULT_SAMPLES = 100000

_NO_DEFAULT = object()


def _section(d, name):
    """
    a sub-mapping of the scenario; absent or empty sections are empty
    """

    section = d.get(name) or {}

    if not isinstance(section, dict):

        raise MalformedDataError(f"'{name}' must be a mapping, got {section!r}")

    return section


def _field(section, where, key, convert, default=_NO_DEFAULT):

    if key not in section:

        if default is _NO_DEFAULT:

            raise MalformedDataError(f"'{where}' is missing '{key}'")

        return default

    value = section[key]

    try:

        return convert(value)

    except (TypeError, ValueError):

        raise MalformedDataError(f"'{where}.{key}' has an invalid value {value!r}")


class SweepSpec(object):
    def __init__(self, v_a, delta_min, delta_max, steps, out=None):
        """
        An evenly spaced excess-noise sweep at fixed modulation

        :param v_a: modulation variance
        :param delta_min: first delta (>= 0)
        :param delta_max: last delta (> delta_min)
        :param steps: number of delta values (>= 2)
        :param out: output path
        :returns:
        :rtype:

        """

        if not (np.isfinite(v_a) and v_a > 0):

            raise DomainError(f"modulation variance must satisfy v_a > 0, got v_a={v_a}")

        if not (0.0 <= delta_min < delta_max and np.isfinite(delta_max)):

            raise DomainError(
                "sweep requires 0 <= delta_min < delta_max, "
                f"got delta_min={delta_min}, delta_max={delta_max}"
            )

        if int(steps) != steps or steps < 2:

            raise DomainError(f"sweep requires steps >= 2, got steps={steps}")

        self._v_a = float(v_a)
        self._delta_min = float(delta_min)
        self._delta_max = float(delta_max)
        self._steps = int(steps)
        self._out = out

    @property
    def v_a(self):
        return self._v_a

    @property
    def delta_min(self):
        return self._delta_min

    @property
    def delta_max(self):
        return self._delta_max

    @property
    def steps(self):
        return self._steps

    @property
    def out(self):
        return self._out

    @property
    def delta_grid(self):
        return np.linspace(self._delta_min, self._delta_max, self._steps)


class Scenario(object):
    def __init__(
        self,
        channel=None,
        kind=AttackKind.OPTIMAL,
        samples=DEFAULT_SAMPLES,
        seed=DEFAULT_SEED,
        workers=DEFAULT_WORKERS,
        sweep=None,
        yaml_dict=None,
    ):
        """
        Everything a run needs: the channel, the attack,
        the Monte Carlo settings and an optional sweep

        :param channel: ChannelParams or None
        :param kind: AttackKind
        :param samples: Monte Carlo rounds
        :param seed: Monte Carlo key
        :param workers: Monte Carlo threads
        :param sweep: SweepSpec or None
        :param yaml_dict: the dict it was read from
        :returns:
        :rtype:

        """

        self._channel = channel
        self._kind = AttackKind(kind)
        self._samples = samples
        self._seed = seed
        self._workers = workers
        self._sweep = sweep
        self._yaml_dict = yaml_dict

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
    def sweep(self):
        return self._sweep

    @property
    def yaml_dict(self):
        return self._yaml_dict

    def sim_config(self):

        if self._channel is None:

            raise DomainError("a Monte Carlo run needs eta, delta and v_a")

        return SimConfig(self._channel, self._kind, self._samples, self._seed, self._workers)

    @classmethod
    def from_dict(cls, d):
        """
        Build a scenario from a configuration dict;
        missing sections fall back to the defaults

        :param d: dict as read from the template config
        :returns:
        :rtype: Scenario

        """

        if d is None:

            d = {}

        if not isinstance(d, dict):

            raise MalformedDataError(f"a scenario must be a mapping, got {type(d).__name__}")

        channel = None

        if "channel" in d:

            c = _section(d, "channel")

            channel = ChannelParams(
                _field(c, "channel", "eta", float),
                _field(c, "channel", "delta", float),
                _field(c, "channel", "v_a", float),
            )

        sim = _section(d, "simulation")

        sweep = None

        if "sweep" in d:

            s = _section(d, "sweep")

            v_a = _field(s, "sweep", "v_a", float, channel.v_a if channel is not None else None)

            if v_a is None:

                raise DomainError("sweep needs v_a, either in sweep or channel")

            sweep = SweepSpec(
                v_a,
                _field(s, "sweep", "delta_min", float),
                _field(s, "sweep", "delta_max", float),
                _field(s, "sweep", "steps", float),
                s.get("out"),
            )

        scenario = cls(
            channel=channel,
            kind=_field(d, "scenario", "attack", AttackKind, AttackKind.OPTIMAL),
            samples=_field(sim, "simulation", "samples", int, DEFAULT_SAMPLES),
            seed=_field(d, "scenario", "seed", int, DEFAULT_SEED),
            workers=_field(sim, "simulation", "workers", int, DEFAULT_WORKERS),
            sweep=sweep,
            yaml_dict=d,
        )

        log.debug(f"scenario from dict: {d}")

        return scenario

    @classmethod
    def from_yaml(cls, yaml_file):
        """
        Create a scenario from a yaml file

        :param yaml_file:
        :returns:
        :rtype: Scenario

        """

        with open(yaml_file, "r") as f:

            setup = yaml.load(f, Loader=yaml.SafeLoader)

        return cls.from_dict(setup)
