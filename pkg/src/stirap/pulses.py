"""Pulse envelopes, the interaction window and the instantaneous mixing frame.

The pump and Stokes Rabi frequencies are delayed copies of one envelope from
the family ``F_n(t) = cos(pi t / tau)**n`` on ``|t| < tau/2`` (zero outside).
The Stokes pulse comes first, centred at ``-t_d/2``; the pump is centred at
``+t_d/2``.  Both fields are on during ``[t_i, t_f]`` with
``t_i = -(tau - t_d)/2`` and ``t_f = (tau - t_d)/2``.

All derivatives are analytic.  At a support edge the derivative returned is
the one-sided limit from inside the pulse, which is what the endpoint
formulas need (e.g. the pump slope at its switch-on).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConfigError, DegenerateField

MAX_ENVELOPE_ORDER = 8


@dataclass(frozen=True, kw_only=True)
class PulseConfig:
    """Full description of one STIRAP run.

    Parameters
    ----------
    n : int
        Envelope exponent, ``1 <= n <= 8``.
    tau : float
        Pulse duration; the natural time unit.
    t_d : float
        Delay of the pump behind the Stokes pulse.
    omega_p0, omega_s0 : float
        Peak pump / Stokes Rabi frequencies (rad per unit time).
    gamma : float
        Decay rate of the excited state.
    """

    n: int = 1
    tau: float = 1.0
    t_d: float = 0.5
    omega_p0: float
    omega_s0: float
    gamma: float = 0.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ConfigError(f"envelope exponent must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not 1 <= self.n <= MAX_ENVELOPE_ORDER:
            raise ConfigError(f"envelope exponent must lie in [1, {MAX_ENVELOPE_ORDER}], got {self.n}")
        for name in ("tau", "t_d", "omega_p0", "omega_s0", "gamma"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.tau <= 0:
            raise ConfigError(f"pulse duration tau must be positive, got {self.tau}")
        if self.t_d <= 0:
            raise ConfigError(f"delay t_d must be positive (Stokes before pump), got {self.t_d}")
        if self.omega_p0 <= 0:
            raise ConfigError(f"pump amplitude must be positive, got {self.omega_p0}")
        if self.omega_s0 <= 0:
            raise ConfigError(f"Stokes amplitude must be positive, got {self.omega_s0}")
        if self.gamma < 0:
            raise ConfigError(f"decay rate gamma must be non-negative, got {self.gamma}")

    @property
    def overlap(self) -> bool:
        return self.t_d < self.tau

    def replace(self, **changes) -> "PulseConfig":
        fields = dict(n=self.n, tau=self.tau, t_d=self.t_d, omega_p0=self.omega_p0,
                      omega_s0=self.omega_s0, gamma=self.gamma)
        fields.update(changes)
        return PulseConfig(**fields)

    def as_dict(self) -> dict:
        return dict(n=self.n, tau=self.tau, t_d=self.t_d, omega_p0=self.omega_p0,
                    omega_s0=self.omega_s0, gamma=self.gamma)


@dataclass(frozen=True)
class InteractionWindow:
    t_i: float
    t_f: float
    overlap: bool

    @property
    def duration(self) -> float:
        return self.t_f - self.t_i


@dataclass(frozen=True)
class MixingFrame:
    """Instantaneous mixing angle, total Rabi frequency and their derivatives.

    ``pump`` and ``stokes`` hold ``(value, first derivative, second derivative)``
    of the individual Rabi frequencies at ``t``.
    """

    t: float
    theta: float
    theta_dot: float
    theta_ddot: float
    omega: float
    omega_dot: float
    omega_tilde: float
    pump: tuple[float, float, float] = (0.0, 0.0, 0.0)
    stokes: tuple[float, float, float] = (0.0, 0.0, 0.0)


def _cos_sin(tau: float, x: float) -> tuple[float, float]:
    # cos(pi x/tau), sin(pi x/tau) written so that cos is exactly 0 at |x| = tau/2
    u = math.pi * (0.5 * tau - abs(x)) / tau
    return math.sin(u), math.copysign(math.cos(u), x)


def envelope_derivs(n: int, tau: float, x: float) -> tuple[float, float, float]:
    """``F_n`` and its first two derivatives at ``x`` (closed support, inside limits)."""
    if abs(x) > 0.5 * tau:
        return 0.0, 0.0, 0.0
    c, s = _cos_sin(tau, x)
    k = math.pi / tau
    f = c**n
    d1 = -n * k * c ** (n - 1) * s
    d2 = -n * k * k * f
    if n >= 2:
        d2 += n * (n - 1) * k * k * c ** (n - 2) * s * s
    return f, d1, d2


def envelope(n: int, tau: float, t):
    """``cos(pi t/tau)**n`` for ``|t| < tau/2`` and exactly 0 elsewhere.

    Accepts scalars or arrays.
    """
    t_arr = np.asarray(t, dtype=float)
    inside = np.abs(t_arr) < 0.5 * tau
    c = np.sin(np.pi * (0.5 * tau - np.abs(t_arr)) / tau)
    out = np.where(inside, np.clip(c, 0.0, 1.0) ** n, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def rabi_pair(cfg: PulseConfig, t):
    """Pump and Stokes Rabi frequencies ``(omega_p, omega_s)`` at ``t``."""
    omega_p = cfg.omega_p0 * envelope(cfg.n, cfg.tau, np.asarray(t) - 0.5 * cfg.t_d)
    omega_s = cfg.omega_s0 * envelope(cfg.n, cfg.tau, np.asarray(t) + 0.5 * cfg.t_d)
    return omega_p, omega_s


def rabi_scalar(cfg: PulseConfig, t: float) -> tuple[float, float]:
    """Fast scalar version of :func:`rabi_pair` for integrator right-hand sides."""
    half = 0.5 * cfg.tau
    xp = t - 0.5 * cfg.t_d
    xs = t + 0.5 * cfg.t_d
    wp = cfg.omega_p0 * math.sin(math.pi * (half - abs(xp)) / cfg.tau) ** cfg.n if abs(xp) < half else 0.0
    ws = cfg.omega_s0 * math.sin(math.pi * (half - abs(xs)) / cfg.tau) ** cfg.n if abs(xs) < half else 0.0
    return wp, ws


def interaction_window(cfg: PulseConfig) -> InteractionWindow:
    half_gap = 0.5 * (cfg.tau - cfg.t_d)
    return InteractionWindow(t_i=-half_gap, t_f=half_gap, overlap=cfg.overlap)


def field_span(cfg: PulseConfig) -> tuple[float, float]:
    """Stokes switch-on and pump switch-off times."""
    half = 0.5 * (cfg.tau + cfg.t_d)
    return -half, half


def switch_times(cfg: PulseConfig) -> list[float]:
    """Sorted distinct on/off times of both pulses."""
    win = interaction_window(cfg)
    start, end = field_span(cfg)
    return sorted({start, win.t_i, win.t_f, end})


def _frame(cfg: PulseConfig, t: float, xp: float, xs: float) -> MixingFrame:
    fp = envelope_derivs(cfg.n, cfg.tau, xp)
    fs = envelope_derivs(cfg.n, cfg.tau, xs)
    p, dp, ddp = (cfg.omega_p0 * v for v in fp)
    s, ds, dds = (cfg.omega_s0 * v for v in fs)
    w2 = p * p + s * s
    if w2 == 0.0:
        raise DegenerateField(f"both Rabi frequencies vanish at t={t!r}")
    omega = math.sqrt(w2)
    cross = dp * s - p * ds  # numerator of theta_dot
    dot = p * dp + s * ds  # half of d(omega^2)/dt
    theta_dot = cross / w2
    theta_ddot = (ddp * s - p * dds) / w2 - 2.0 * cross * dot / (w2 * w2)
    omega_dot = dot / omega
    return MixingFrame(
        t=t,
        theta=math.atan2(p, s),
        theta_dot=theta_dot,
        theta_ddot=theta_ddot,
        omega=omega,
        omega_dot=omega_dot,
        omega_tilde=math.sqrt(w2 + 4.0 * theta_dot * theta_dot),
        pump=(p, dp, ddp),
        stokes=(s, ds, dds),
    )


def mixing_frame(cfg: PulseConfig, t: float) -> MixingFrame:
    """Mixing angle ``arctan(omega_p/omega_s)`` with analytic derivatives at ``t``.

    Raises :class:`DegenerateField` where both fields vanish.
    """
    t = float(t)
    return _frame(cfg, t, t - 0.5 * cfg.t_d, t + 0.5 * cfg.t_d)


def window_frame(cfg: PulseConfig, t: float) -> MixingFrame:
    """Frame at ``t`` in ``[t_i, t_f]`` with both envelope arguments kept on their supports.

    Used by integrands and right-hand sides that evaluate exactly at the
    window edges, where rounding could otherwise drop a pulse.
    """
    t = float(t)
    half = 0.5 * cfg.tau
    return _frame(cfg, t, max(t - 0.5 * cfg.t_d, -half), min(t + 0.5 * cfg.t_d, half))


def endpoint_frames(cfg: PulseConfig) -> tuple[MixingFrame, MixingFrame]:
    """Frames at pump switch-on ``t_i`` and Stokes switch-off ``t_f``.

    The envelope arguments are pinned to the support edges so that rounding
    in ``t_i``/``t_f`` cannot push the evaluation outside a pulse.
    """
    if not cfg.overlap:
        raise DegenerateField("pulses do not overlap; the interaction window is empty")
    win = interaction_window(cfg)
    half = 0.5 * cfg.tau
    start = _frame(cfg, win.t_i, -half, win.t_i + 0.5 * cfg.t_d)
    end = _frame(cfg, win.t_f, win.t_f - 0.5 * cfg.t_d, half)
    return start, end


def is_exact_case(cfg: PulseConfig, rtol: float = 1e-12) -> bool:
    """True for ``n=1``, ``t_d = tau/2`` and equal amplitudes.

    There the total Rabi frequency is constant and the mixing angle is linear
    in time across the window.
    """
    return (
        cfg.n == 1
        and math.isclose(cfg.t_d, 0.5 * cfg.tau, rel_tol=rtol)
        and math.isclose(cfg.omega_p0, cfg.omega_s0, rel_tol=rtol)
    )


def total_rabi(cfg: PulseConfig, t):
    omega_p, omega_s = rabi_pair(cfg, t)
    return np.hypot(omega_p, omega_s)


def adiabaticity(cfg: PulseConfig, samples: int = 2001) -> float:
    """Adiabaticity parameter ``1 / (max_t Omega(t) * tau)``.

    The maximum is located on a uniform grid over the whole field span and
    then refined with a bounded scalar search around the best grid point.
    """
    start, end = field_span(cfg)
    grid = np.linspace(start, end, max(int(samples), 1000))
    values = total_rabi(cfg, grid)
    k = int(np.argmax(values))
    best = float(values[k])
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    if hi > lo:
        res = minimize_scalar(lambda x: -float(total_rabi(cfg, x)), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12 * cfg.tau})
        best = max(best, -float(res.fun))
    return 1.0 / (best * cfg.tau)
