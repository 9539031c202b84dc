"""Long-pulse (``gamma * tau >> 1``) transfer probability.

The logarithm of the dark-state amplitude grows at rate ``eta_d'``.  Right
after pump switch-on the bright/excited amplitudes ring at about ``Omega_i/2``
and are damped at rate ``gamma/4``; this transient contributes
``8 alpha^2 (gamma^2 - Omega_i^2) / Omega_i^4`` to ``ln n3`` where ``alpha``
is the mixing-angle rate at switch-on.  Afterwards the amplitudes follow the
pulses quasistationarily and the remaining terms are integrals over the
window.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from ._quad import integrate
from .errors import PreconditionViolated, ResonanceSingularity
from .pulses import (
    MixingFrame,
    PulseConfig,
    adiabaticity,
    endpoint_frames,
    interaction_window,
    is_exact_case,
    window_frame,
)
from .results import TransferResult

GAMMA_TAU_WARN = 10.0
GAMMA_TAU_MIN = 5.0


def _exp(x: float) -> float:
    # the exponent is unbounded above outside the regime of validity
    return math.exp(x) if x < 709.0 else math.inf


@dataclass(frozen=True)
class TransientParams:
    omega_i: float
    alpha: float
    gamma: float
    t_prime: float

    def __post_init__(self):
        if not self.omega_i > 0:
            raise ValueError("omega_i must be positive")
        if self.t_prime < 0:
            raise ValueError("t_prime must be non-negative")


@dataclass(frozen=True)
class LongPulseTerms:
    h_d2_transient: float
    h_d1_quasi: float
    h_d2_quasi: float


def _ringing(omega_i: float, gamma: float, t_prime: float) -> tuple[float, float]:
    """``cos(k t'/2)`` and ``sin(k t'/2)/k`` with ``k = sqrt(omega_i^2 - gamma^2/4)``.

    Both are entire in ``k^2``; below critical damping they become cosh/sinh.
    """
    k2 = omega_i * omega_i - 0.25 * gamma * gamma
    if abs(omega_i - 0.5 * gamma) < 1e-12 * gamma:
        warnings.warn("critically damped transient; using the analytic limit", ResonanceSingularity,
                      stacklevel=3)
        return 1.0, 0.5 * t_prime
    if k2 > 0:
        k = math.sqrt(k2)
        return math.cos(0.5 * k * t_prime), math.sin(0.5 * k * t_prime) / k
    kappa = math.sqrt(-k2)
    return math.cosh(0.5 * kappa * t_prime), math.sinh(0.5 * kappa * t_prime) / kappa


def hd2_transient(p: TransientParams) -> float:
    """Second-order dark-state log-rate during the switch-on transient."""
    w2 = p.omega_i**2
    a2 = p.alpha**2
    g = p.gamma
    cos_term, sin_over_k = _ringing(p.omega_i, g, p.t_prime)
    damp = math.exp(-0.25 * g * p.t_prime)
    const = 2.0 * g * a2 / w2
    return -const + const * damp * cos_term + a2 * (g * g - 2.0 * w2) / w2 * damp * sin_over_k


def hd_quasistationary(frame: MixingFrame, gamma: float) -> tuple[float, float]:
    """First and second order quasistationary dark-state log-rates."""
    w = frame.omega
    if not w > 0:
        from .errors import DegenerateField

        raise DegenerateField(f"total Rabi frequency vanishes at t={frame.t!r}")
    td, tdd, wd = frame.theta_dot, frame.theta_ddot, frame.omega_dot
    g2 = gamma * gamma
    w2 = w * w
    h1 = -2.0 * gamma * td * td / w2
    h2 = 4.0 * td * td * wd * (w2 - 2.0 * g2) / (w2 * w2 * w) + 4.0 * td * tdd * (g2 - w2) / (w2 * w2)
    return h1, h2


def long_pulse_terms(cfg: PulseConfig, t: float) -> LongPulseTerms:
    """All three rate terms at ``t`` inside the window."""
    fi, _ = endpoint_frames(cfg)
    win = interaction_window(cfg)
    h1, h2 = hd_quasistationary(window_frame(cfg, t), cfg.gamma)
    trans = hd2_transient(TransientParams(fi.omega, fi.theta_dot, cfg.gamma, t - win.t_i))
    return LongPulseTerms(trans, h1, h2)


def _gamma_gate(gamma_tau: float, force: bool) -> list[str]:
    notes = []
    if gamma_tau < GAMMA_TAU_MIN and not force:
        raise PreconditionViolated(
            f"gamma*tau = {gamma_tau:.3g} is below {GAMMA_TAU_MIN}; the transient cannot decay "
            "inside the window (pass force=True to evaluate anyway)"
        )
    if gamma_tau < GAMMA_TAU_WARN:
        notes.append(f"gamma*tau = {gamma_tau:.3g} < {GAMMA_TAU_WARN}: transient not fully damped "
                     "within the window; expect only average agreement")
    return notes


def n3_long(cfg: PulseConfig, force: bool = False) -> TransferResult:
    """Target population for long pulses including the switch-on transient.

    ``diagnostics["exponent"]`` is split into ``transient``, ``first_integral``
    and ``second_integral``.
    """
    if not cfg.overlap:
        raise PreconditionViolated("pulses do not overlap (t_d >= tau); no interaction window")
    notes = _gamma_gate(cfg.gamma * cfg.tau, force)
    fi, _ = endpoint_frames(cfg)
    win = interaction_window(cfg)
    g = cfg.gamma
    w_i2 = fi.omega**2
    transient = 8.0 * fi.theta_dot**2 * (g * g - w_i2) / (w_i2 * w_i2)

    def first(x):
        fr = window_frame(cfg, x)
        return fr.theta_dot**2 / fr.omega**2

    def second(x):
        fr = window_frame(cfg, x)
        w2 = fr.omega**2
        td = fr.theta_dot
        return (td * td * fr.omega_dot * (w2 - 2 * g * g) / (w2 * w2 * fr.omega)
                + td * fr.theta_ddot * (g * g - w2) / (w2 * w2))

    i1, e1 = integrate(first, win.t_i, win.t_f, 1e-10 / cfg.tau)
    i2, e2 = integrate(second, win.t_i, win.t_f, 1e-10 / cfg.tau)
    parts = {"transient": transient, "first_integral": -4.0 * g * i1, "second_integral": 8.0 * i2}
    exponent = sum(parts.values())
    diag = {"exponent": exponent, "parts": parts, "quad_error": 4 * g * e1 + 8 * e2,
            "alpha": fi.theta_dot, "omega_i": fi.omega, "gamma_tau": g * cfg.tau}
    if fi.omega < g:
        notes.append("omega_i < gamma: the exponent may be positive and n3 may exceed 1")
    return TransferResult(n3=_exp(exponent), method="long", epsilon=adiabaticity(cfg),
                          diagnostics=diag, warnings=tuple(notes))


def n3_long_closed(omega0: float, tau: float, gamma: float, include_transient: bool = True) -> TransferResult:
    """Closed form for ``n=1``, ``t_d = tau/2`` and equal amplitudes ``omega0``."""
    pi2 = math.pi**2
    transient = 8.0 * pi2 * (gamma**2 - omega0**2) / (omega0**4 * tau**2)
    main = -2.0 * gamma * pi2 / (omega0**2 * tau)
    exponent = main + (transient if include_transient else 0.0)
    notes = []
    if gamma * tau < GAMMA_TAU_MIN:
        notes.append(f"gamma*tau = {gamma * tau:.3g} is outside the long-pulse regime")
    elif gamma * tau < GAMMA_TAU_WARN:
        notes.append(f"gamma*tau = {gamma * tau:.3g} < {GAMMA_TAU_WARN}: only average agreement expected")
    method = "long-closed" if include_transient else "long-closed-no-transient"
    diag = {"exponent": exponent, "parts": {"transient": transient, "first_integral": main},
            "transient_share": transient / main}
    return TransferResult(n3=_exp(exponent), method=method, epsilon=1.0 / (omega0 * tau),
                          diagnostics=diag, warnings=tuple(notes))


def n3_long_closed_for(cfg: PulseConfig, include_transient: bool = True) -> TransferResult:
    """:func:`n3_long_closed` for a configuration that must be the exactly solvable pair."""
    if not is_exact_case(cfg):
        raise PreconditionViolated(
            "closed long-pulse form needs n=1, t_d=tau/2 and equal pump/Stokes amplitudes"
        )
    return n3_long_closed(cfg.omega_p0, cfg.tau, cfg.gamma, include_transient)
