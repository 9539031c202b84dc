"""Stimulated Raman adiabatic passage in a three-level lambda system.

Direct integration of the Schroedinger equation, closed-form transfer
probabilities with nonadiabatic corrections, long-pulse formulas with
excited-state decay, and parameter sweeps.
"""
from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"

from .adiabatic import (
    n3_first_order,
    n3_second_order,
    optimality_check,
    phase_envelope,
    phase_Phi,
    phase_PhiTilde,
)
from .dynamics import GROUND, IntegratorSettings, StateVector, Trajectory, n3_ode, propagate
from .errors import (
    ConfigError,
    DarkDepleted,
    DegenerateField,
    InsufficientData,
    PreconditionViolated,
    QuadratureFailure,
    ResonanceSingularity,
    StepFailure,
    StirapError,
)
from .longpulse import hd2_transient, hd_quasistationary, n3_long, n3_long_closed
from .pulses import PulseConfig, adiabaticity, interaction_window, mixing_frame
from .results import TransferResult
from .sweep import SweepSpec, fit_scaling, preset, run_sweep

__all__ = [
    "GROUND", "ConfigError", "DarkDepleted", "DegenerateField", "InsufficientData", "IntegratorSettings",
    "PreconditionViolated", "PulseConfig", "QuadratureFailure", "ResonanceSingularity", "StateVector",
    "StepFailure", "StirapError", "SweepSpec", "Trajectory", "TransferResult", "adiabaticity",
    "fit_scaling", "hd2_transient", "hd_quasistationary", "interaction_window", "mixing_frame",
    "n3_first_order", "n3_long", "n3_long_closed", "n3_ode", "n3_second_order", "optimality_check",
    "phase_Phi", "phase_PhiTilde", "phase_envelope", "preset", "propagate", "run_sweep",
]
