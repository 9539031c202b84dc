"""Command line entry point: ``stirap {simulate,analytic,sweep,fit,rerun}``.

All frequencies are in units of ``1/tau`` and times in units of ``tau`` when
``--tau 1`` (the default), so ``--omega-p0 20`` means a pump pulse with
peak Rabi frequency ``20/tau``.

Exit codes: 0 ok, 2 usage or validation error, 3 integration failure,
4 analysis failure.
"""
from __future__ import annotations

import argparse
import filecmp
import json
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .adiabatic import n3_first_order, n3_second_order, optimality_check
from .dynamics import IntegratorSettings, propagate
from .errors import (
    ConfigError,
    DegenerateField,
    InsufficientData,
    PreconditionViolated,
    QuadratureFailure,
    StepFailure,
    StirapError,
)
from .longpulse import n3_long, n3_long_closed_for
from .pulses import PulseConfig, field_span, interaction_window
from .sweep import METHODS, SweepSpec, fit_scaling, preset, read_csv, run_sweep, select_family, write_csv

EXIT_OK, EXIT_USAGE, EXIT_INTEGRATION, EXIT_ANALYSIS = 0, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunManifest:
    command: str
    argv: list[str]
    config: dict | None
    tolerances: dict
    outputs: list[str]
    version: str
    duration_s: float
    extra: dict = field(default_factory=dict)

    def write(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    @classmethod
    def read(cls, path) -> "RunManifest":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(**data)


def manifest_path(output) -> Path:
    output = Path(output)
    return output.with_name(output.name + ".manifest.json")


def _g(x: float) -> str:
    return f"{x:.6g}"


# argument parsing

def _add_pulse_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("pulse pair (frequencies in 1/tau, times in tau)")
    g.add_argument("--n", type=int, default=1, help="envelope exponent of cos^n, 1..8 (default 1)")
    g.add_argument("--tau", type=float, default=1.0, help="pulse duration [time unit] (default 1)")
    g.add_argument("--td", type=float, default=0.5, help="pump delay behind Stokes [time unit] (default 0.5)")
    g.add_argument("--omega-p0", type=float, required=True, help="peak pump Rabi frequency [rad/time]")
    g.add_argument("--omega-s0", type=float, required=True, help="peak Stokes Rabi frequency [rad/time]")
    g.add_argument("--gamma", type=float, default=0.0, help="excited-state decay rate [1/time] (default 0)")


def _add_tolerance_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("integrator")
    g.add_argument("--rtol", type=float, default=1e-10, help="relative tolerance (default 1e-10)")
    g.add_argument("--atol", type=float, default=1e-12, help="absolute tolerance (default 1e-12)")
    g.add_argument("--method", default="DOP853", help="DOP853, RK45 or rk4 (default DOP853)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stirap",
        description="Population transfer in a three-level lambda system driven by a delayed "
                    "Stokes/pump pulse pair. Frequencies are in 1/tau, times in tau.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate the Schroedinger equation and write the trajectory")
    _add_pulse_flags(p)
    _add_tolerance_flags(p)
    p.add_argument("--samples", type=int, default=401, help="output time samples (default 401)")
    p.add_argument("--basis", choices=("bare", "bed"), default="bare",
                   help="integrate in the bare or bright/excited/dark basis (default bare)")
    p.add_argument("--out", default="trajectory.csv", help="trajectory CSV path (default trajectory.csv)")

    p = sub.add_parser("analytic", help="evaluate a closed-form transfer probability")
    _add_pulse_flags(p)
    p.add_argument("--order", choices=("first", "second", "long", "long-closed"), required=True,
                   help="first/second: nonadiabatic corrections; long: long-pulse quadrature formula; "
                        "long-closed: its closed form for n=1, td=tau/2, equal amplitudes")
    p.add_argument("--no-transient", action="store_true", help="drop the switch-on transient term (long-closed)")
    p.add_argument("--force", action="store_true", help="evaluate the long formula below gamma*tau = 5")
    p.add_argument("--out", help="also write the summary to this text file")

    p = sub.add_parser("sweep", help="run a parameter sweep and write a CSV table")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="fig2, fig3 or fig4")
    src.add_argument("--spec", help="sweep description file (key = value lines, see README)")
    p.add_argument("--out", required=True, help="CSV path; a .gp column map and a manifest are written next to it")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")

    p = sub.add_parser("fit", help="fit the power law of 1 - n3 against the adiabaticity parameter")
    p.add_argument("--input", required=True, help="sweep CSV")
    p.add_argument("--family", action="append", default=[], metavar="KEY=VALUE",
                   help="row filter, repeatable; keys: ratio (omega_s0/omega_p0), n, gamma [1/tau], "
                        "td [tau], omega_p0, omega_s0 [1/tau]")
    p.add_argument("--method", default=None,
                   help="method rows to fit (default: the analytic method present in the file)")
    p.add_argument("--envelope", choices=("phase", "peaks", "given"), default="phase",
                   help="phase: worst cosine phase of the formula for each row; peaks: local maxima of "
                        "the data; given: values used as they are (default phase)")
    p.add_argument("--reference", choices=("1-n3", "abs_err_vs_ode"), default="1-n3",
                   help="quantity fitted (default 1-n3)")
    p.add_argument("--eps-max", type=float, default=None,
                   help="keep rows with epsilon = 1/(max Omega * tau) at or below this value")
    p.add_argument("--out", help="also write the report to this text file")

    p = sub.add_parser("rerun", help="repeat a run from its manifest")
    p.add_argument("manifest", help="*.manifest.json written by an earlier run")
    p.add_argument("--verify", action="store_true",
                   help="rerun into a scratch directory and compare outputs byte for byte")
    return parser


def _config(args) -> PulseConfig:
    return PulseConfig(n=args.n, tau=args.tau, t_d=args.td, omega_p0=args.omega_p0,
                       omega_s0=args.omega_s0, gamma=args.gamma)


# sweep description files

def parse_spec_file(text: str) -> SweepSpec:
    """Parse a sweep description.

    One ``key = value`` per line, ``#`` starts a comment.  Keys: ``name``,
    ``n``, ``tau``, ``td``, ``omega_p0``, ``omega_s0``, ``gamma``, ``axis``,
    ``values`` (comma list) or ``range`` (``start:stop:count``), ``methods``
    (comma list) and repeatable ``family`` lines of ``key=value`` pairs
    separated by commas.
    """
    fields: dict[str, str] = {}
    families = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "family":
            fam = []
            for item in value.split(","):
                k, _, v = item.partition("=")
                if not _:
                    raise ConfigError(f"line {lineno}: family entries are key=value")
                k = k.strip()
                fam.append(("t_d" if k == "td" else k, float(v)))
            families.append(tuple(fam))
        elif key in fields:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        else:
            fields[key] = value
    known = {"name", "n", "tau", "td", "omega_p0", "omega_s0", "gamma", "axis", "values", "range", "methods"}
    unknown = set(fields) - known
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}")
    try:
        if "values" in fields and "range" in fields:
            raise ConfigError("give either values or range, not both")
        if "values" in fields:
            values = tuple(float(v) for v in fields["values"].split(","))
        elif "range" in fields:
            start, stop, count = fields["range"].split(":")
            values = tuple(np.linspace(float(start), float(stop), int(count)))
        else:
            raise ConfigError("missing values or range")
        base = PulseConfig(n=int(fields.get("n", 1)), tau=float(fields.get("tau", 1.0)),
                           t_d=float(fields.get("td", 0.5)), omega_p0=float(fields.get("omega_p0", 1.0)),
                           omega_s0=float(fields.get("omega_s0", 1.0)), gamma=float(fields.get("gamma", 0.0)))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed number: {exc}") from exc
    methods = tuple(m.strip() for m in fields.get("methods", "ode").split(",") if m.strip())
    return SweepSpec(fields.get("name", "custom"), base, fields.get("axis", "omega_p0"), values, methods,
                     tuple(families) or ((),))


# commands

def cmd_simulate(args, argv) -> int:
    cfg = _config(args)
    settings = IntegratorSettings(rel_tol=args.rtol, abs_tol=args.atol, method=args.method,
                                  sample_count=args.samples)
    start, end = field_span(cfg)
    t_read = interaction_window(cfg).t_f if cfg.overlap else end
    t0 = time.perf_counter()
    traj = propagate(cfg, start, end, settings=settings, basis=args.basis, extra_times=(t_read,))
    pops_f = np.abs(traj.state_at(t_read).as_array()) ** 2
    pops_e = np.abs(traj.final.as_array()) ** 2
    traj.to_csv(args.out)
    duration = time.perf_counter() - t0
    print(f"t_f   = {_g(t_read)}: n1 = {_g(pops_f[0])}  n2 = {_g(pops_f[1])}  n3 = {_g(pops_f[2])}")
    print(f"t_end = {_g(end)}: n1 = {_g(pops_e[0])}  n2 = {_g(pops_e[1])}  n3 = {_g(pops_e[2])}")
    print(f"trajectory: {args.out}")
    RunManifest("simulate", argv, cfg.as_dict(), asdict(settings) | {"max_step": str(settings.max_step)},
                [str(args.out)], __version__, duration).write(manifest_path(args.out))
    return EXIT_OK


def _analytic_lines(args, cfg) -> list[str]:
    if args.no_transient and args.order != "long-closed":
        raise UsageError("--no-transient only applies to --order long-closed")
    if args.order == "first":
        res = n3_first_order(cfg)
    elif args.order == "second":
        res = n3_second_order(cfg)
    elif args.order == "long":
        res = n3_long(cfg, force=args.force)
    else:
        res = n3_long_closed_for(cfg, include_transient=not args.no_transient)
    lines = [f"method: {res.method}", f"n3 = {_g(res.n3)}"]
    if res.epsilon is not None:
        lines.append(f"epsilon = {_g(res.epsilon)}")
    if "exponent" in res.diagnostics:
        lines.append(f"exponent = {_g(res.diagnostics['exponent'])}")
        for name, value in res.diagnostics["parts"].items():
            lines.append(f"  {name} = {_g(value)}")
    for key in ("Phi", "PhiTilde"):
        if key in res.diagnostics:
            lines.append(f"{key} = {_g(res.diagnostics[key])}")
    if args.order in ("first", "second"):
        rep = optimality_check(cfg, 1 if args.order == "first" else 2)
        lines.append(f"optimality (order {rep.order}): residual = {_g(rep.residual)}, scale = {_g(rep.scale)}, "
                     f"optimal = {'yes' if rep.optimal else 'no'}")
    if "regime" in res.diagnostics:
        lines.append(f"note: {res.diagnostics['regime']}")
    lines.extend(f"warning: {w}" for w in res.warnings)
    return lines


def cmd_analytic(args, argv) -> int:
    cfg = _config(args)
    t0 = time.perf_counter()
    lines = _analytic_lines(args, cfg)
    print("\n".join(lines))
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        RunManifest("analytic", argv, cfg.as_dict(), {"quadrature_rel": 1e-10}, [str(args.out)], __version__,
                    time.perf_counter() - t0, {"order": args.order}).write(manifest_path(args.out))
    return EXIT_OK


def cmd_sweep(args, argv) -> int:
    if args.preset is not None:
        spec = preset(args.preset)
    else:
        spec = parse_spec_file(Path(args.spec).read_text(encoding="utf-8"))
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    t0 = time.perf_counter()
    rows = run_sweep(spec, workers=args.workers)
    gp = write_csv(rows, args.out)
    failed = sum(1 for r in rows if r.error)
    print(f"{len(rows)} rows ({len(spec.configs())} configurations x {len(spec.methods)} methods) -> {args.out}")
    print(f"column map: {gp}")
    if failed:
        print(f"{failed} rows carry an error note (see the error column)")
    RunManifest("sweep", argv, spec.base.as_dict(), asdict(IntegratorSettings(sample_count=2))
                | {"max_step": "inf", "quadrature_rel": 1e-10}, [str(args.out), str(gp)], __version__,
                time.perf_counter() - t0,
                {"name": spec.name, "axis": spec.axis, "methods": list(spec.methods),
                 "families": [dict(f) for f in spec.families], "points": len(spec.values)}
                ).write(manifest_path(args.out))
    return EXIT_OK


def _parse_family(items) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--family expects KEY=VALUE, got {item!r}")
        key = key.strip()
        if key not in ("ratio", "n", "gamma", "td", "tau", "omega_p0", "omega_s0"):
            raise UsageError(f"unknown family key {key!r}")
        try:
            out[key] = float(value)
        except ValueError as exc:
            raise UsageError(f"--family {key}: not a number: {value!r}") from exc
    return out


def cmd_fit(args, argv) -> int:
    t0 = time.perf_counter()
    rows = read_csv(args.input)
    rows = select_family(rows, **_parse_family(args.family))
    method = args.method
    if method is None:
        present = [m for m in METHODS if m != "ode" and any(r.method == m for r in rows)]
        if not present:
            raise InsufficientData("no analytic rows in the selection; pass --method")
        method = present[0]
    rows = [r for r in rows if r.method == method and not r.error]
    if args.eps_max is not None:
        rows = [r for r in rows if r.epsilon <= args.eps_max]
    fit = fit_scaling(rows, reference=args.reference, envelope=args.envelope)
    lines = [f"rows: {len(rows)} ({method}, envelope={args.envelope}, reference={args.reference})",
             f"envelope points: {len(fit.epsilon)}",
             f"slope = {_g(fit.slope)} +/- {_g(fit.stderr)}"]
    print("\n".join(lines))
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        RunManifest("fit", argv, None, {}, [str(args.out)], __version__, time.perf_counter() - t0,
                    {"input": str(args.input)}).write(manifest_path(args.out))
    return EXIT_OK


def cmd_rerun(args, argv) -> int:
    man = RunManifest.read(args.manifest)
    if not args.verify:
        return main(man.argv)
    with tempfile.TemporaryDirectory() as tmp:
        scratch = list(man.argv)
        mapping = {}
        for i, a in enumerate(scratch):
            if a == "--out" and i + 1 < len(scratch):
                mapping[scratch[i + 1]] = str(Path(tmp) / Path(scratch[i + 1]).name)
                scratch[i + 1] = mapping[man.argv[i + 1]]
        code = main(scratch)
        if code != EXIT_OK:
            return code
        mismatched = []
        for orig in man.outputs:
            copy = Path(tmp) / Path(orig).name
            if not Path(orig).exists() or not filecmp.cmp(orig, copy, shallow=False):
                mismatched.append(orig)
        if mismatched:
            print(f"rerun differs from recorded outputs: {', '.join(mismatched)}", file=sys.stderr)
            return EXIT_ANALYSIS
        print(f"rerun reproduces {len(man.outputs)} output file(s) byte for byte")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "analytic": cmd_analytic, "sweep": cmd_sweep, "fit": cmd_fit,
            "rerun": cmd_rerun}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, argv)
    except (UsageError, ConfigError, PreconditionViolated) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StepFailure, DegenerateField) as exc:
        code = EXIT_INTEGRATION if args.command == "simulate" else EXIT_ANALYSIS
        print(f"error: {exc}", file=sys.stderr)
        return code
    except (InsufficientData, QuadratureFailure, StirapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
