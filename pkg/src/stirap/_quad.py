"""Adaptive Gauss-Kronrod quadrature with a hard failure mode."""
from __future__ import annotations

import warnings

from scipy.integrate import IntegrationWarning, quad

from .errors import QuadratureFailure

MAX_EVALUATIONS = 1_000_000
_KRONROD_POINTS = 21


def integrate(func, a: float, b: float, abs_tol: float, rel_tol: float = 0.0) -> tuple[float, float]:
    """Integrate ``func`` over ``[a, b]``; returns ``(value, error_estimate)``.

    Raises :class:`QuadratureFailure` when the error target is not met within
    ``MAX_EVALUATIONS`` integrand calls.
    """
    if b == a:
        return 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, err, info = quad(func, a, b, epsabs=abs_tol, epsrel=rel_tol,
                                    limit=MAX_EVALUATIONS // _KRONROD_POINTS, full_output=True)[:3]
        except IntegrationWarning as exc:
            raise QuadratureFailure(str(exc).strip()) from exc
    if info["neval"] > MAX_EVALUATIONS or err > max(abs_tol, rel_tol * abs(value)):
        raise QuadratureFailure(f"error estimate {err:.3g} above target after {info['neval']} evaluations")
    return value, err
