"""Adiabatic and superadiabatic bases and the short-pulse transfer formulas.

For ``gamma * tau << 1`` the decay term is dropped.  The first-order basis
diagonalises the bare Hamiltonian; rewriting the dynamics in it leaves a
coupling proportional to ``theta_dot``.  Diagonalising that Hamiltonian gives
the second-order basis, with splitting ``omega_tilde = sqrt(omega^2 +
4 theta_dot^2)`` and residual coupling ``beta``.  Neglecting ``beta`` yields
closed forms for the target population that depend only on the endpoint
values of the mixing-angle derivatives and on one phase integral.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._quad import integrate
from .dynamics import StateVector
from .errors import DegenerateField, PreconditionViolated
from .pulses import (
    MixingFrame,
    PulseConfig,
    adiabaticity,
    endpoint_frames,
    interaction_window,
    window_frame,
)
from .results import TransferResult

SQRT2 = math.sqrt(2.0)
GAMMA_SHORT_LIMIT = 0.01
_ZERO_DERIVATIVE = 1e-12


@dataclass(frozen=True)
class AdiabaticBasis:
    """Eigenbasis of order 1 or 2.

    ``vectors`` holds ``b-, b0, b+`` as columns.  For order 1 the components
    are on the bare states; for order 2 they are on the order-1 vectors.
    ``eigenvalues`` is ``(lambda-, 0, lambda+)``.
    """

    order: int
    vectors: np.ndarray
    eigenvalues: np.ndarray

    @property
    def minus(self) -> np.ndarray:
        return self.vectors[:, 0]

    @property
    def zero(self) -> np.ndarray:
        return self.vectors[:, 1]

    @property
    def plus(self) -> np.ndarray:
        return self.vectors[:, 2]


@dataclass(frozen=True)
class AdiabaticAmplitudes:
    minus: complex
    zero: complex
    plus: complex
    order: int = 2

    def as_array(self) -> np.ndarray:
        return np.array([self.minus, self.zero, self.plus], dtype=complex)


@dataclass(frozen=True)
class PhaseIntegral:
    value: float
    kind: str
    error: float


@dataclass(frozen=True)
class OptimalityReport:
    order: int
    residual: float
    scale: float
    optimal: bool
    details: dict


def _require_field(frame: MixingFrame, value: float, what: str) -> None:
    if not value > 0:
        raise DegenerateField(f"{what} vanishes at t={frame.t!r}")


def bare_hamiltonian(theta: float, omega: float) -> np.ndarray:
    """Lossless bare Hamiltonian written through mixing angle and total Rabi frequency."""
    wp, ws = omega * math.sin(theta), omega * math.cos(theta)
    return 0.5 * np.array([[0, wp, 0], [wp, 0, ws], [0, ws, 0]], dtype=complex)


def basis1(frame: MixingFrame) -> AdiabaticBasis:
    """Eigenvectors of the lossless bare Hamiltonian.

    ``b0 = (cos, 0, -sin)`` is the dark state; ``b-`` and ``b+`` are
    ``(sin, -1, cos)/sqrt2`` and ``(sin, +1, cos)/sqrt2`` with eigenvalues
    ``-omega/2`` and ``+omega/2``.
    """
    _require_field(frame, frame.omega, "total Rabi frequency")
    s, c = math.sin(frame.theta), math.cos(frame.theta)
    h = SQRT2 / 2
    vectors = np.array([[h * s, c, h * s], [-h, 0.0, h], [h * c, -s, h * c]], dtype=complex)
    half = 0.5 * frame.omega
    return AdiabaticBasis(1, vectors, np.array([-half, 0.0, half]))


def coupling_h1(frame: MixingFrame) -> np.ndarray:
    """Hamiltonian on the order-1 amplitudes ``(a-, a0, a+)``."""
    _require_field(frame, frame.omega, "total Rabi frequency")
    k = 1j * SQRT2 * frame.theta_dot
    w = frame.omega
    return 0.5 * np.array([[-w, k, 0], [-k, 0, -k], [0, k, w]], dtype=complex)


def basis2(frame: MixingFrame) -> AdiabaticBasis:
    """Eigenvectors of :func:`coupling_h1`, as coefficients over the order-1 basis."""
    wt = frame.omega_tilde
    _require_field(frame, wt, "effective splitting")
    w = frame.omega
    k = SQRT2 * frame.theta_dot / wt
    p = (wt + w) / (2 * wt)
    m = (wt - w) / (2 * wt)
    vectors = np.array(
        [
            [p, -k, -m],
            [1j * k, 1j * w / wt, 1j * k],
            [m, k, -p],
        ],
        dtype=complex,
    )
    half = 0.5 * wt
    return AdiabaticBasis(2, vectors, np.array([-half, 0.0, half]))


def coupling_beta(frame: MixingFrame) -> float:
    """Off-diagonal coupling left in the order-2 basis."""
    wt = frame.omega_tilde
    _require_field(frame, wt, "effective splitting")
    return 2 * SQRT2 / wt**2 * (frame.omega * frame.theta_ddot - frame.omega_dot * frame.theta_dot)


def _phase_tol(cfg: PulseConfig) -> float:
    win = interaction_window(cfg)
    return 1e-10 * win.duration / (adiabaticity(cfg) * cfg.tau)


def _check_window(cfg: PulseConfig) -> None:
    if not cfg.overlap:
        raise PreconditionViolated("pulses do not overlap (t_d >= tau); no interaction window")


def phase_Phi(cfg: PulseConfig, t: float | None = None) -> PhaseIntegral:
    """``1/2 * integral of omega_tilde`` from ``t_i`` to ``t`` (default ``t_f``)."""
    _check_window(cfg)
    win = interaction_window(cfg)
    upper = win.t_f if t is None else float(t)
    value, err = integrate(lambda x: 0.5 * window_frame(cfg, x).omega_tilde, win.t_i, upper, _phase_tol(cfg))
    return PhaseIntegral(value, "Phi", err)


def _phi_tilde_integrand(cfg: PulseConfig, x: float) -> float:
    fr = window_frame(cfg, x)
    wt2 = fr.omega_tilde**2
    corr = fr.theta_dot * fr.omega_dot - fr.omega * fr.theta_ddot
    return 0.5 * math.sqrt(wt2 + 16.0 * corr * corr / (wt2 * wt2))


def phase_PhiTilde(cfg: PulseConfig) -> PhaseIntegral:
    """Phase integral of the order-3 splitting over the window."""
    _check_window(cfg)
    win = interaction_window(cfg)
    value, err = integrate(lambda x: _phi_tilde_integrand(cfg, x), win.t_i, win.t_f, _phase_tol(cfg))
    return PhaseIntegral(value, "PhiTilde", err)


def _gamma_warnings(cfg: PulseConfig) -> list[str]:
    if cfg.gamma * cfg.tau > GAMMA_SHORT_LIMIT:
        return [f"gamma*tau = {cfg.gamma * cfg.tau:.3g} exceeds {GAMMA_SHORT_LIMIT}; "
                "the short-pulse formulas ignore decay"]
    return []


def _clamp_unit(x: float) -> float:
    if -1e-12 <= x < 0.0:
        return 0.0
    if 1.0 < x <= 1.0 + 1e-12:
        return 1.0
    return x


def n3_first_order(cfg: PulseConfig) -> TransferResult:
    """Target population with the first-derivative nonadiabatic correction.

    ``n3 = [W_i W_f + 4 th_i th_f cos(Phi)]^2 / (Wt_i^2 Wt_f^2)`` where ``W`` is
    the total Rabi frequency, ``th`` the mixing-angle rate and ``Wt`` the
    effective splitting at pump switch-on / Stokes switch-off.
    """
    _check_window(cfg)
    fi, ff = endpoint_frames(cfg)
    phi = phase_Phi(cfg)
    num = fi.omega * ff.omega + 4.0 * fi.theta_dot * ff.theta_dot * math.cos(phi.value)
    n3 = _clamp_unit(num * num / (fi.omega_tilde**2 * ff.omega_tilde**2))
    notes = _gamma_warnings(cfg)
    diag = {
        "Phi": phi.value, "Phi_error": phi.error,
        "theta_dot_i": fi.theta_dot, "theta_dot_f": ff.theta_dot,
        "omega_i": fi.omega, "omega_f": ff.omega,
        "omega_tilde_i": fi.omega_tilde, "omega_tilde_f": ff.omega_tilde,
        "oscillation_bound": 16.0 * fi.theta_dot**2 / fi.omega**2,
    }
    if abs(fi.theta_dot) <= _ZERO_DERIVATIVE / cfg.tau and abs(ff.theta_dot) <= _ZERO_DERIVATIVE / cfg.tau:
        diag["regime"] = "higher-order regime: endpoint first derivatives vanish"
    return TransferResult(n3=n3, method="analytic1", epsilon=adiabaticity(cfg), diagnostics=diag,
                          warnings=tuple(notes))


def n3_second_order(cfg: PulseConfig) -> TransferResult:
    """Target population with the second-derivative correction.

    Requires the mixing-angle rate to vanish at both window edges (true for
    ``n >= 2``).
    """
    _check_window(cfg)
    fi, ff = endpoint_frames(cfg)
    tol = _ZERO_DERIVATIVE / cfg.tau
    if abs(fi.theta_dot) > tol or abs(ff.theta_dot) > tol:
        raise PreconditionViolated(
            "second-order formula needs a vanishing mixing-angle rate at pump switch-on and "
            f"Stokes switch-off; got theta_dot(t_i)={fi.theta_dot:.6g}, theta_dot(t_f)={ff.theta_dot:.6g}"
        )
    wi4, wf4 = fi.omega**4, ff.omega**4
    ai, af = fi.theta_ddot, ff.theta_ddot
    diag = {"theta_ddot_i": ai, "theta_ddot_f": af, "omega_i": fi.omega, "omega_f": ff.omega,
            "oscillation_bound": 64.0 * ai * ai / wi4}
    notes = _gamma_warnings(cfg)
    if abs(ai) <= tol / cfg.tau and abs(af) <= tol / cfg.tau:
        diag["regime"] = "higher-order regime (eps^(2n)): endpoint first and second derivatives vanish"
        return TransferResult(n3=1.0, method="analytic2", epsilon=adiabaticity(cfg), diagnostics=diag,
                              warnings=tuple(notes))
    phi = phase_PhiTilde(cfg)
    num = fi.omega**2 * ff.omega**2 + 16.0 * ai * af * math.cos(phi.value)
    n3 = _clamp_unit(num * num / ((wi4 + 16.0 * ai * ai) * (wf4 + 16.0 * af * af)))
    diag.update(PhiTilde=phi.value, PhiTilde_error=phi.error)
    return TransferResult(n3=n3, method="analytic2", epsilon=adiabaticity(cfg), diagnostics=diag,
                          warnings=tuple(notes))


def initial_amplitudes(cfg: PulseConfig) -> AdiabaticAmplitudes:
    """Order-2 amplitudes that reproduce the atom in level 1 at ``t_i``."""
    _check_window(cfg)
    fi, _ = endpoint_frames(cfg)
    side = -1j * SQRT2 * fi.theta_dot / fi.omega_tilde
    return AdiabaticAmplitudes(side, -1j * fi.omega / fi.omega_tilde, side)


def amplitudes_second_order(cfg: PulseConfig, t: float) -> StateVector:
    """Bare amplitudes at ``t`` from adiabatic following of the order-2 basis."""
    _check_window(cfg)
    win = interaction_window(cfg)
    if not win.t_i <= t <= win.t_f:
        raise ValueError(f"t={t!r} outside the interaction window [{win.t_i}, {win.t_f}]")
    fi, ff = endpoint_frames(cfg)
    frame = fi if t == win.t_i else ff if t == win.t_f else window_frame(cfg, t)
    a = initial_amplitudes(cfg).as_array()
    phi = phase_Phi(cfg, t).value
    phases = np.array([cmath.exp(1j * phi), 1.0, cmath.exp(-1j * phi)])
    psi = basis1(frame).vectors @ (basis2(frame).vectors @ (a * phases))
    return StateVector.from_array(psi)


def optimality_check(cfg: PulseConfig, order: int) -> OptimalityReport:
    """How far the pulse pair is from the optimal-transfer condition.

    Order 1 compares the pump slope at switch-on with the Stokes slope at
    switch-off.  Order 2 compares ``W(t_i)^2 th2(t_f)`` with
    ``W(t_f)^2 th2(t_i)`` (``th2``: second derivative of the mixing angle).
    """
    fi, ff = endpoint_frames(cfg)
    if order == 1:
        a, b = abs(fi.pump[1]), abs(ff.stokes[1])
        residual = a - b
        scale = max(a, b)
        # exact equality condition of the first-order formula
        exact = abs(fi.omega * ff.theta_dot) - abs(ff.omega * fi.theta_dot)
        details = {"pump_slope_ti": fi.pump[1], "stokes_slope_tf": ff.stokes[1], "exact_residual": exact}
    elif order == 2:
        a = fi.omega**2 * ff.theta_ddot
        b = ff.omega**2 * fi.theta_ddot
        residual = min(abs(a - b), abs(a + b))
        scale = max(abs(a), abs(b))
        details = {"theta_ddot_ti": fi.theta_ddot, "theta_ddot_tf": ff.theta_ddot,
                   "omega_ti": fi.omega, "omega_tf": ff.omega}
    else:
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    if scale == 0.0:
        details["note"] = "both endpoint derivatives vanish"
        return OptimalityReport(order, 0.0, 0.0, True, details)
    return OptimalityReport(order, residual, scale, abs(residual) < 1e-9 * scale, details)


def phase_envelope(cfg: PulseConfig, order: int) -> float:
    """Upper envelope of ``1 - n3`` over the oscillating cosine phase.

    Both transfer formulas read ``n3 = (A + B cos(phase))^2 / D``; the envelope
    is ``1 - min_c (A + B c)^2 / D`` over ``c`` in ``[-1, 1]``.
    """
    _check_window(cfg)
    fi, ff = endpoint_frames(cfg)
    if order == 1:
        a = fi.omega * ff.omega
        b = 4.0 * fi.theta_dot * ff.theta_dot
        d = fi.omega_tilde**2 * ff.omega_tilde**2
    elif order == 2:
        ai, af = fi.theta_ddot, ff.theta_ddot
        a = fi.omega**2 * ff.omega**2
        b = 16.0 * ai * af
        d = (fi.omega**4 + 16.0 * ai * ai) * (ff.omega**4 + 16.0 * af * af)
    else:
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    low = max(abs(a) - abs(b), 0.0)
    return 1.0 - low * low / d
