"""Numerical propagation of the three-level Schroedinger equation.

The state is ``(c1, c2, c3)`` in the rotating bare basis and evolves under

    H = 1/2 [[0, Op, 0], [Op, -i gamma, Os], [0, Os, 0]]

(hbar = 1).  Decay out of level 2 makes ``H`` non-Hermitian and the norm
shrinks at rate ``gamma |c2|^2``.  Inside the interaction window the same
dynamics can be integrated in the bright/excited/dark basis, which gives an
independent route to the same populations.

Complex amplitudes are integrated as pairs of reals.
"""
from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DarkDepleted, StepFailure
from .pulses import (
    PulseConfig,
    adiabaticity,
    endpoint_frames,
    field_span,
    interaction_window,
    mixing_frame,
    rabi_scalar,
    switch_times,
    window_frame,
)
from .results import TransferResult

@dataclass(frozen=True)
class StateVector:
    c1: complex
    c2: complex
    c3: complex

    @classmethod
    def from_array(cls, arr) -> "StateVector":
        a = np.asarray(arr, dtype=complex)
        return cls(complex(a[0]), complex(a[1]), complex(a[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3], dtype=complex)

    @property
    def norm2(self) -> float:
        return abs(self.c1) ** 2 + abs(self.c2) ** 2 + abs(self.c3) ** 2


GROUND = StateVector(1.0 + 0j, 0j, 0j)


@dataclass(frozen=True)
class BedState:
    """Amplitudes on the bright, excited and dark states."""

    C_b: complex
    C_e: complex
    C_d: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.C_b, self.C_e, self.C_d], dtype=complex)

    @property
    def norm2(self) -> float:
        return abs(self.C_b) ** 2 + abs(self.C_e) ** 2 + abs(self.C_d) ** 2


@dataclass(frozen=True)
class IntegratorSettings:
    """Tolerances and output sampling for :func:`propagate`.

    ``method`` is any embedded scipy Runge-Kutta scheme (``"DOP853"``,
    ``"RK45"``) or ``"rk4"`` for classical fixed-step RK4 with
    ``fixed_steps`` steps per unit of ``tau``.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    sample_count: int = 201
    method: str = "DOP853"
    fixed_steps: int = 4000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("integrator tolerances must be positive")
        if self.sample_count < 2:
            raise ValueError("sample_count must be at least 2")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution. ``states`` has shape ``(len(times), 3)``."""

    times: np.ndarray
    states: np.ndarray
    config: PulseConfig
    settings: IntegratorSettings
    basis: str = "bare"
    stats: dict = field(default_factory=dict)

    @property
    def samples(self) -> list[tuple[float, StateVector]]:
        return [(float(t), StateVector.from_array(s)) for t, s in zip(self.times, self.states)]

    @property
    def final(self) -> StateVector:
        return StateVector.from_array(self.states[-1])

    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    def state_at(self, t: float) -> StateVector:
        """Stored sample at ``t`` (exact match required)."""
        idx = np.flatnonzero(self.times == t)
        if idx.size == 0:
            raise KeyError(f"no sample at t={t!r}")
        return StateVector.from_array(self.states[idx[0]])

    def to_csv(self, path) -> None:
        pops = self.populations()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "re_c1", "im_c1", "re_c2", "im_c2", "re_c3", "im_c3", "n1", "n2", "n3"])
            for t, c, p in zip(self.times, self.states, pops):
                vals = [t, c[0].real, c[0].imag, c[1].real, c[1].imag, c[2].real, c[2].imag, *p]
                writer.writerow([f"{float(v):.17g}" for v in vals])


def populations(psi: StateVector) -> tuple[float, float, float]:
    return abs(psi.c1) ** 2, abs(psi.c2) ** 2, abs(psi.c3) ** 2


def hamiltonian(cfg: PulseConfig, t: float) -> np.ndarray:
    omega_p, omega_s = rabi_scalar(cfg, t)
    return 0.5 * np.array(
        [[0, omega_p, 0], [omega_p, -1j * cfg.gamma, omega_s], [0, omega_s, 0]], dtype=complex
    )


def bed_hamiltonian(cfg: PulseConfig, t: float, frame=None) -> np.ndarray:
    """Hamiltonian acting on ``[C_b, C_e, C_d]``.

    The bright-dark coupling is ``i*theta_dot`` (not halved): this is the
    value generated by the time dependence of the basis and the one under
    which the dark amplitude obeys ``dC_d/dt = -theta_dot C_b``.
    """
    fr = frame if frame is not None else mixing_frame(cfg, t)
    w, td = fr.omega, fr.theta_dot
    return np.array(
        [[0, 0.5 * w, 1j * td], [0.5 * w, -0.5j * cfg.gamma, 0], [-1j * td, 0, 0]], dtype=complex
    )


def _bed_matrix(theta: float) -> np.ndarray:
    # rows: bright, excited, dark expressed on psi_1, psi_2, psi_3
    s, c = math.sin(theta), math.cos(theta)
    return np.array([[s, 0.0, c], [0.0, 1.0, 0.0], [c, 0.0, -s]])


def to_bed(cfg: PulseConfig, t: float, psi: StateVector, frame=None) -> BedState:
    fr = frame if frame is not None else mixing_frame(cfg, t)
    return BedState(*(_bed_matrix(fr.theta) @ psi.as_array()))


def from_bed(cfg: PulseConfig, t: float, bed: BedState, frame=None) -> StateVector:
    fr = frame if frame is not None else mixing_frame(cfg, t)
    # the transformation matrix is real, symmetric and orthogonal: its own inverse
    return StateVector.from_array(_bed_matrix(fr.theta) @ bed.as_array())


def eta_from_bed(bed: BedState) -> tuple[complex, complex, complex]:
    """Logarithmic dark amplitude and bright/excited amplitudes relative to it."""
    if abs(bed.C_d) < 1e-12:
        raise DarkDepleted(f"|C_d| = {abs(bed.C_d):.3g} is too small")
    return bed.C_b / bed.C_d, bed.C_e / bed.C_d, cmath.log(bed.C_d)


# right-hand sides on y = [Re c1, Re c2, Re c3, Im c1, Im c2, Im c3]

def _bare_rhs(cfg: PulseConfig):
    g = 0.5 * cfg.gamma

    def rhs(t, y):
        p, s = rabi_scalar(cfg, t)
        p *= 0.5
        s *= 0.5
        x1, x2, x3, y1, y2, y3 = y
        return [
            p * y2,
            p * y1 + s * y3 - g * x2,
            s * y2,
            -p * x2,
            -(p * x1 + s * x3) - g * y2,
            -s * x2,
        ]

    return rhs


def _bed_rhs(cfg: PulseConfig):
    g = 0.5 * cfg.gamma

    def rhs(t, y):
        fr = window_frame(cfg, t)
        w, td = 0.5 * fr.omega, fr.theta_dot
        xb, xe, xd, yb, ye, yd = y
        return [
            w * ye + td * xd,
            w * yb - g * xe,
            -td * xb,
            -w * xe + td * yd,
            -w * xb - g * ye,
            -td * yb,
        ]

    return rhs


def _split(c: np.ndarray) -> np.ndarray:
    return np.concatenate([c.real, c.imag])


def _join(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y)
    return y[:3] + 1j * y[3:]


def _rk4(rhs, t0, t1, y0, t_eval, steps):
    h = (t1 - t0) / steps
    ts = t0 + h * np.arange(steps + 1)
    ts[-1] = t1
    ys = np.empty((steps + 1, y0.size))
    y = np.array(y0, dtype=float)
    ys[0] = y
    for k in range(steps):
        t = ts[k]
        k1 = np.asarray(rhs(t, y))
        k2 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k1))
        k3 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k2))
        k4 = np.asarray(rhs(t + h, y + h * k3))
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[k + 1] = y
    # cubic Hermite would be nicer; linear is adequate for the dense fixed grid
    out = np.empty((len(t_eval), y0.size))
    for j in range(y0.size):
        out[:, j] = np.interp(t_eval, ts, ys[:, j])
    out[-1] = ys[-1]
    return out, {"nfev": 4 * steps}


def _integrate(rhs, t0, t1, y0, t_eval, settings: IntegratorSettings, tau: float):
    if settings.method.lower() == "rk4":
        steps = max(1, int(math.ceil(settings.fixed_steps * (t1 - t0) / tau)))
        return _rk4(rhs, t0, t1, y0, t_eval, steps)
    sol = solve_ivp(
        rhs,
        (t0, t1),
        y0,
        method=settings.method,
        t_eval=t_eval,
        rtol=settings.rel_tol,
        atol=settings.abs_tol,
        max_step=settings.max_step,
    )
    if sol.status != 0:
        raise StepFailure(f"integration failed on [{t0}, {t1}]: {sol.message}")
    ys = sol.y.T
    if ys.shape[0] != len(t_eval):
        raise StepFailure(f"integration on [{t0}, {t1}] stopped early at t={sol.t[-1]!r}")
    return ys, {"nfev": int(sol.nfev)}


def propagate(
    cfg: PulseConfig,
    t0: float,
    t1: float,
    psi0: StateVector = GROUND,
    settings: IntegratorSettings | None = None,
    basis: str = "bare",
    extra_times=(),
) -> Trajectory:
    """Integrate ``i dPsi/dt = H(t) Psi`` from ``t0`` to ``t1``.

    The span is split at every pulse switch time so that derivative jumps of
    the envelopes fall on step boundaries.  With ``basis="bed"`` the part of
    the span inside the interaction window is integrated in the
    bright/excited/dark basis and converted back; the returned samples are
    always bare amplitudes.  ``extra_times`` are added to the output grid.
    """
    settings = settings or IntegratorSettings()
    if not t1 > t0:
        raise ValueError("propagate requires t1 > t0")
    if basis not in ("bare", "bed"):
        raise ValueError(f"unknown basis {basis!r}")
    if psi0.norm2 > 1.0 + 1e-12:
        raise ValueError("initial state norm exceeds 1")

    grid = np.linspace(t0, t1, settings.sample_count)
    grid = np.union1d(grid, [t for t in extra_times if t0 <= t <= t1])
    win = interaction_window(cfg)
    cuts = [t for t in switch_times(cfg) if t0 < t < t1]
    edges = [t0, *cuts, t1]

    use_bed = basis == "bed" and cfg.overlap
    frame_i = frame_f = None
    if use_bed:
        frame_i, frame_f = endpoint_frames(cfg)

    states = np.empty((grid.size, 3), dtype=complex)
    psi = psi0.as_array()
    states[0] = psi
    nfev = 0
    for a, b in zip(edges[:-1], edges[1:]):
        mask = (grid > a) & (grid <= b)
        t_eval = np.concatenate([grid[mask], [b]]) if not mask.any() or grid[mask][-1] != b else grid[mask]
        in_window = use_bed and a >= win.t_i and b <= win.t_f
        if in_window:
            fa = frame_i if a == win.t_i else window_frame(cfg, a)
            fb = frame_f if b == win.t_f else window_frame(cfg, b)
            bed0 = to_bed(cfg, a, StateVector.from_array(psi), frame=fa).as_array()
            ys, info = _integrate(_bed_rhs(cfg), a, b, _split(bed0), t_eval, settings, cfg.tau)
            seg = np.array([_join(y) for y in ys])
            for k, t in enumerate(t_eval):
                fr = fb if t == b else window_frame(cfg, t)
                seg[k] = from_bed(cfg, t, BedState(*seg[k]), frame=fr).as_array()
        else:
            ys, info = _integrate(_bare_rhs(cfg), a, b, _split(psi), t_eval, settings, cfg.tau)
            seg = np.array([_join(y) for y in ys])
        nfev += info["nfev"]
        states[np.flatnonzero(mask)] = seg[: mask.sum()]
        psi = seg[-1]
    return Trajectory(times=grid, states=states, config=cfg, settings=settings, basis=basis,
                      stats={"nfev": nfev})


def n3_ode(cfg: PulseConfig, settings: IntegratorSettings | None = None, basis: str = "bare",
           full_span: bool = True) -> TransferResult:
    """Target population from direct integration, starting in level 1.

    The population is read at the Stokes switch-off ``t_f``.  With
    ``full_span`` the run continues to pump switch-off and the population
    there is reported too; level 3 is decoupled after ``t_f`` so both agree.
    """
    settings = settings or IntegratorSettings(sample_count=2)
    start, end = field_span(cfg)
    win = interaction_window(cfg)
    t_read = win.t_f if cfg.overlap else end
    stop = end if full_span else t_read
    traj = propagate(cfg, start, stop, GROUND, settings, basis=basis, extra_times=(t_read,))
    n_read = populations(traj.state_at(t_read))
    diag = {"n1": n_read[0], "n2": n_read[1], "t_read": t_read, "nfev": traj.stats["nfev"],
            "norm2": traj.state_at(t_read).norm2}
    warnings = []
    if full_span:
        n_end = populations(traj.final)
        diag["n3_end"] = n_end[2]
        if abs(n_end[2] - n_read[2]) > 1e-8:
            warnings.append(f"level-3 population drifted after t_f by {n_end[2] - n_read[2]:.3g}")
    return TransferResult(n3=float(n_read[2]), method="ode", epsilon=adiabaticity(cfg),
                          diagnostics=diag, warnings=tuple(warnings))
