"""Parameter sweeps, figure presets and scaling fits.

A sweep evaluates a list of transfer methods over an ordered grid of one
parameter, for one or more families of configurations (amplitude ratios or
decay rates).  Every row is a pure function of its configuration, so serial
and parallel runs give identical tables.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import linregress

from .adiabatic import n3_first_order, n3_second_order, phase_envelope
from .dynamics import n3_ode
from .errors import ConfigError, InsufficientData, StirapError
from .longpulse import GAMMA_TAU_MIN, n3_long, n3_long_closed_for
from .pulses import PulseConfig, adiabaticity, endpoint_frames, is_exact_case

METHODS = ("ode", "analytic1", "analytic2", "long", "long-closed", "long-closed-no-transient")
AXES = ("omega_p0", "omega_s0", "both-locked", "gamma")
CSV_HEADER = ("preset", "n", "tau", "td", "omega_p0", "omega_s0", "gamma", "epsilon", "method", "n3",
              "abs_err_vs_ode", "error")
N3_CEILING = 1.0 + 1e-9
DEFECT_FLOOR = 1e-14
_FAMILY_KEYS = ("ratio", "n", "tau", "t_d", "omega_p0", "omega_s0", "gamma")


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: ``values`` of ``axis`` applied to ``base`` for every family.

    A family is a tuple of ``(key, value)`` overrides.  ``ratio`` fixes
    ``omega_s0 / omega_p0`` while the pump amplitude is swept; the other keys
    are :class:`PulseConfig` fields.
    """

    name: str
    base: PulseConfig
    axis: str
    values: tuple[float, ...]
    methods: tuple[str, ...]
    families: tuple[tuple[tuple[str, float], ...], ...] = ((),)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "families", tuple(tuple(f) for f in self.families) or ((),))
        if self.axis not in AXES:
            raise ConfigError(f"unknown sweep axis {self.axis!r}; expected one of {', '.join(AXES)}")
        if not self.methods:
            raise ConfigError("a sweep needs at least one method")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}; expected a subset of {', '.join(METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("methods must not repeat")
        if not self.values:
            raise ConfigError("a sweep needs at least one axis value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError("axis values must be strictly increasing")
        for fam in self.families:
            for key, _ in fam:
                if key not in _FAMILY_KEYS:
                    raise ConfigError(f"unknown family key {key!r}")
            if dict(fam).get("ratio") is not None and self.axis != "omega_p0":
                raise ConfigError("a ratio family needs the omega_p0 axis")
        for cfg in self.configs():
            _check_methods(cfg, self.methods)

    def configs(self) -> list[PulseConfig]:
        """All configurations in row order (family-major, then axis order)."""
        out = []
        for fam in self.families:
            over = dict(fam)
            ratio = over.pop("ratio", None)
            base = self.base.replace(**over) if over else self.base
            for v in self.values:
                out.append(_apply_axis(base, self.axis, v, ratio))
        return out


@dataclass(frozen=True)
class SweepRow:
    preset: str
    config: PulseConfig
    epsilon: float
    method: str
    n3: float
    abs_err_vs_ode: float | None = None
    error: str = ""

    def csv_fields(self) -> list[str]:
        c = self.config
        nums = [c.tau, c.t_d, c.omega_p0, c.omega_s0, c.gamma, self.epsilon]
        err = "" if self.abs_err_vs_ode is None else _fmt(self.abs_err_vs_ode)
        return [self.preset, str(c.n), *map(_fmt, nums), self.method, _fmt(self.n3), err, self.error]


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _apply_axis(base: PulseConfig, axis: str, v: float, ratio: float | None) -> PulseConfig:
    if axis == "omega_p0":
        s = base.omega_s0 if ratio is None else ratio * v
        return base.replace(omega_p0=v, omega_s0=s)
    if axis == "omega_s0":
        return base.replace(omega_s0=v)
    if axis == "both-locked":
        return base.replace(omega_p0=v, omega_s0=v)
    return base.replace(gamma=v)


def _check_methods(cfg: PulseConfig, methods) -> None:
    needs_window = {"analytic1", "analytic2", "long", "long-closed", "long-closed-no-transient"}
    if needs_window.intersection(methods) and not cfg.overlap:
        raise ConfigError(f"analytic methods need overlapping pulses (t_d < tau); got {cfg}")
    if "analytic2" in methods and cfg.n < 2:
        raise ConfigError("analytic2 needs a vanishing mixing-angle rate at the window edges (n >= 2)")
    if {"long-closed", "long-closed-no-transient"}.intersection(methods) and not is_exact_case(cfg):
        raise ConfigError("closed long-pulse methods need n=1, t_d=tau/2 and equal amplitudes")
    if "long" in methods and cfg.gamma * cfg.tau < GAMMA_TAU_MIN:
        raise ConfigError(f"long method needs gamma*tau >= {GAMMA_TAU_MIN}; got {cfg.gamma * cfg.tau:g}")
    if "analytic2" in methods:
        endpoint_frames(cfg)


_EVALUATORS = {
    "ode": n3_ode,
    "analytic1": n3_first_order,
    "analytic2": n3_second_order,
    "long": n3_long,
    "long-closed": lambda cfg: n3_long_closed_for(cfg, True),
    "long-closed-no-transient": lambda cfg: n3_long_closed_for(cfg, False),
}


def _evaluate(task: tuple[PulseConfig, tuple[str, ...]]) -> tuple[float, list[tuple[str, float, str]]]:
    cfg, methods = task
    eps = adiabaticity(cfg)
    out = []
    for m in methods:
        try:
            n3 = float(_EVALUATORS[m](cfg).n3)
            err = ""
            if not 0.0 <= n3 <= N3_CEILING:
                err = f"formula outside validity: n3={n3:.6g}"
                n3 = math.nan
        except (StirapError, ArithmeticError, ValueError) as exc:
            n3, err = math.nan, f"{type(exc).__name__}: {exc}"
        out.append((m, n3, err))
    return eps, out


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list[SweepRow]:
    """Evaluate every method on every configuration of ``spec``.

    Rows come back in axis order with methods in the order of ``spec.methods``.
    Failures land in the ``error`` field with ``n3 = nan``.  ``workers > 1``
    evaluates configurations in a process pool.
    """
    tasks = [(cfg, spec.methods) for cfg in spec.configs()]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_evaluate(t) for t in tasks]
    rows = []
    for (cfg, _), (eps, values) in zip(tasks, results):
        ode = next((n3 for m, n3, _ in values if m == "ode"), None)
        for m, n3, err in values:
            diff = None if ode is None else abs(n3 - ode)
            rows.append(SweepRow(spec.name, cfg, eps, m, n3, diff, err))
    return rows


def preset(name: str) -> SweepSpec:
    """Sweeps behind the three published comparison plots.

    ``fig2``/``fig3``: ``n=1``/``n=2``, ``t_d = tau/2``, Stokes-to-pump ratios
    1, 2 and 5, pump area 2..50 at 97 points.  ``fig4``: ``n=1``, equal
    amplitudes 5..60 at 111 points, ``gamma*tau`` in 10, 20, 40, 100.
    """
    ratios = tuple(((("ratio", r),) for r in (1.0, 2.0, 5.0)))
    grid = tuple(np.linspace(2.0, 50.0, 97))
    if name == "fig2":
        base = PulseConfig(n=1, tau=1.0, t_d=0.5, omega_p0=1.0, omega_s0=1.0)
        return SweepSpec("fig2", base, "omega_p0", grid, ("ode", "analytic1"), ratios)
    if name == "fig3":
        base = PulseConfig(n=2, tau=1.0, t_d=0.5, omega_p0=1.0, omega_s0=1.0)
        return SweepSpec("fig3", base, "omega_p0", grid, ("ode", "analytic2"), ratios)
    if name == "fig4":
        base = PulseConfig(n=1, tau=1.0, t_d=0.5, omega_p0=1.0, omega_s0=1.0)
        gammas = tuple(((("gamma", g),) for g in (10.0, 20.0, 40.0, 100.0)))
        return SweepSpec("fig4", base, "both-locked", tuple(np.linspace(5.0, 60.0, 111)),
                         ("ode", "long-closed", "long-closed-no-transient"), gammas)
    raise ConfigError(f"unknown preset {name!r}; expected fig2, fig3 or fig4")


# CSV

def write_csv(rows, path) -> Path:
    """Write rows in long format plus a ``.gp`` column map next to the file."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.csv_fields())
    gp = path.with_suffix(".gp")
    lines = [f"# column map for {path.name} (comma separated, one header line)",
             "set datafile separator ','"]
    lines += [f"# {i}: {name}" for i, name in enumerate(CSV_HEADER, start=1)]
    lines.append(f"# e.g. plot '{path.name}' every ::1 using 5:10")
    gp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return gp


def read_csv(path) -> list[SweepRow]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in CSV_HEADER[:-1] if c not in (reader.fieldnames or ())]
        if missing:
            raise ConfigError(f"{path}: missing columns {missing}")
        for rec in reader:
            cfg = PulseConfig(n=int(rec["n"]), tau=float(rec["tau"]), t_d=float(rec["td"]),
                              omega_p0=float(rec["omega_p0"]), omega_s0=float(rec["omega_s0"]),
                              gamma=float(rec["gamma"]))
            err = rec["abs_err_vs_ode"]
            rows.append(SweepRow(rec["preset"], cfg, float(rec["epsilon"]), rec["method"],
                                 float(rec["n3"]), float(err) if err else None, rec.get("error") or ""))
    return rows


def select_family(rows, **criteria) -> list[SweepRow]:
    """Rows matching every ``key=value``; ``ratio`` means ``omega_s0/omega_p0``."""
    def value(row, key):
        if key == "ratio":
            return row.config.omega_s0 / row.config.omega_p0
        if key == "method":
            return row.method
        if key == "td":
            key = "t_d"
        return getattr(row.config, key)

    out = []
    for row in rows:
        ok = True
        for key, want in criteria.items():
            got = value(row, key)
            ok = got == want if isinstance(want, str) else math.isclose(got, float(want), rel_tol=1e-9)
            if not ok:
                break
        if ok:
            out.append(row)
    return out


# scaling fits

@dataclass(frozen=True)
class ScalingFit:
    slope: float
    stderr: float
    intercept: float
    epsilon: tuple[float, ...] = field(default=())
    defect: tuple[float, ...] = field(default=())


def _pairs(rows, reference: str):
    eps, val = [], []
    for r in rows:
        if isinstance(r, SweepRow):
            e = r.epsilon
            v = 1.0 - r.n3 if reference == "1-n3" else r.abs_err_vs_ode
        else:
            e, n3 = r
            v = 1.0 - n3 if reference == "1-n3" else n3
        eps.append(float(e))
        val.append(math.nan if v is None else float(v))
    return np.array(eps), np.array(val)


def _local_maxima(x: np.ndarray) -> np.ndarray:
    # non-strict interior maxima: a flat series keeps every interior point
    if x.size < 3:
        return np.arange(x.size)
    mid = np.flatnonzero((x[1:-1] >= x[:-2]) & (x[1:-1] >= x[2:])) + 1
    return mid


def fit_scaling(rows, reference: str = "1-n3", envelope: str = "peaks") -> ScalingFit:
    """Power law ``defect ~ eps**slope`` fitted to the upper envelope.

    Parameters
    ----------
    rows : sequence of SweepRow or ``(epsilon, n3)`` pairs
    reference : {"1-n3", "abs_err_vs_ode"}
        Quantity fitted.  For pairs with ``abs_err_vs_ode`` the second
        element is taken as the error itself.
    envelope : {"peaks", "given", "phase"}
        ``peaks`` keeps the local maxima of the oscillating curve; ``given``
        treats every value as already on the envelope; ``phase`` replaces
        each row by the worst-phase value of its transfer formula (rows must
        be :class:`SweepRow` with an ``analytic1``/``analytic2`` method).

    Returns slope and its standard error from least squares in log-log.
    """
    if reference not in ("1-n3", "abs_err_vs_ode"):
        raise ValueError(f"unknown reference {reference!r}")
    rows = list(rows)
    if len(rows) < 4:
        raise InsufficientData(f"need at least 4 points, got {len(rows)}")
    if envelope == "phase":
        eps, val = [], []
        for r in rows:
            order = {"analytic1": 1, "analytic2": 2}.get(getattr(r, "method", None))
            if order is None:
                raise ValueError("phase envelope needs analytic1/analytic2 rows")
            eps.append(r.epsilon)
            val.append(phase_envelope(r.config, order))
        eps, val = np.array(eps), np.array(val)
    elif envelope in ("peaks", "given"):
        eps, val = _pairs(rows, reference)
    else:
        raise ValueError(f"unknown envelope {envelope!r}")
    if not np.all(np.isfinite(val)) or not np.all(eps > 0):
        raise InsufficientData("non-finite values or non-positive epsilon in the input")
    if np.any(val <= DEFECT_FLOOR):
        raise InsufficientData(f"values at or below the {DEFECT_FLOOR:g} floor cannot be fitted in log space")
    order = np.argsort(eps)
    eps, val = eps[order], val[order]
    if envelope == "peaks":
        keep = _local_maxima(val)
        eps, val = eps[keep], val[keep]
    if eps.size < 2 or np.ptp(eps) == 0:
        raise InsufficientData(f"only {eps.size} distinct envelope points")
    if eps.size == 2:
        slope = float(np.diff(np.log(val))[0] / np.diff(np.log(eps))[0])
        return ScalingFit(slope, math.inf, float(np.log(val[0]) - slope * np.log(eps[0])),
                          tuple(eps), tuple(val))
    res = linregress(np.log(eps), np.log(val))
    return ScalingFit(float(res.slope), float(res.stderr), float(res.intercept), tuple(eps), tuple(val))
