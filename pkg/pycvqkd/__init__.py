# -*- coding: utf-8 -*-

"""Top-level package for pycvqkd."""

__version__ = "0.1.0"

from .quadrature import (Mode, MomentState, Quadrature, QuadIndex,
                         SymplecticMap, bs_map, compose, propagate, tms_map)
from .circuit import (ChannelParams, CircuitParams, CoherentAmplitude,
                      build_circuit, invert_channel, verify_channel)
from .ensemble import (VarianceConvention, conditional_variance,
                       ensemble_moments)
from .attacks import (AttackKind, AttackReport, ThresholdCurve, attack_report,
                      threshold, threshold_curve, theta_opt, v_be)
from .montecarlo import EmpiricalReport, SimConfig, run_simulation
from .config import Scenario
from .errors import DomainError, MalformedDataError
from .io.package_utils import copy_template


__all__ = [
    "AttackKind",
    "AttackReport",
    "ChannelParams",
    "CircuitParams",
    "DomainError",
    "EmpiricalReport",
    "MalformedDataError",
    "Scenario",
    "SimConfig",
    "ThresholdCurve",
    "attack_report",
    "copy_template",
    "run_simulation",
    "threshold_curve",
]
