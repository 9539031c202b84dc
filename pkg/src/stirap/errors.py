"""Exception and warning types raised by the toolkit."""


class StirapError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(StirapError, ValueError):
    """Invalid pulse configuration or sweep description."""


class DegenerateField(StirapError):
    """Both Rabi frequencies vanish, so the mixing angle is undefined."""


class StepFailure(StirapError):
    """The adaptive integrator could not make progress."""


class DarkDepleted(StirapError):
    """Dark-state amplitude too small to take its logarithm."""


class QuadratureFailure(StirapError):
    """Adaptive quadrature did not reach the requested tolerance."""


class PreconditionViolated(StirapError):
    """A closed-form formula was applied outside its stated preconditions."""


class InsufficientData(StirapError):
    """Not enough usable points for a scaling fit."""


class ResonanceSingularity(RuntimeWarning):
    """Critically damped transient (Omega_i == gamma/2); the analytic limit is used."""
