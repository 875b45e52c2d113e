"""Command-line front end: ``purcellsim {evolve,efficiency,optimize,design,reproduce}``.

Rates are dimensionless (g = 1 as reference) unless ``--units mhz``, in
which case every rate flag is a frequency over 2 pi in MHz. A config file of
``key = value`` lines (keys mirror flag names) supplies defaults; explicit
flags win. Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .design import PRESETS, InfeasibleTargetError, sweep_length_birefringence
from .dynamics import (
    IntegrationError,
    NoDecayChannelError,
    StabilityError,
    UndefinedPurityError,
    analytic_two_level_efficiency,
    emission_budget_steady,
    emission_budget_timedomain,
    evolve,
)
from .figures import FIGURES, reproduce
from .model import ConfigurationError, ModelSpec, Rates, Scheme, build
from .optimize import VARY_FIELDS, ObjectiveError, optimize_efficiency, optimize_lossless_average, optimize_window

RATE_FLAGS = ("g", "kappa", "gamma", "delta_c", "delta_p", "delta_z", "omega")
NUMERICAL_ERRORS = (IntegrationError, StabilityError, NoDecayChannelError, UndefinedPurityError,
                    ObjectiveError, InfeasibleTargetError, np.linalg.LinAlgError)


class UsageError(Exception):
    pass


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:count`` inclusive of both ends, or a single value."""
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) != 3:
            raise ValueError
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid {text!r} must be start:stop:count") from None
    if count < 1:
        raise UsageError(f"grid {text!r} has no points")
    return np.linspace(start, stop, count)


def parse_duration(text) -> float:
    """Float, optionally with a ``pi`` suffix: ``8pi``, ``2.5pi``, ``16``."""
    s = str(text).strip().lower().replace("*", "")
    try:
        if s.endswith("pi"):
            head = s[:-2]
            return (float(head) if head else 1.0) * math.pi
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid duration {text!r}") from None


def read_config(path) -> dict:
    cfg = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        cfg[key.replace("-", "_")] = value
    return cfg


def _add_model_flags(p, scheme_default="two-level"):
    p.add_argument("--scheme", default=scheme_default,
                   help="two-level | two-level-biref | three-level | n-level-chain")
    for name in RATE_FLAGS:
        default = 1.0 if name == "g" else 0.0
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=default)
    p.add_argument("--n", type=int, default=1, help="ground-state count (n-level-chain)")
    p.add_argument("--basis", default="circular", choices=["circular", "linear"])
    p.add_argument("--units", default="dimensionless", choices=["dimensionless", "mhz"])
    p.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="purcellsim", description=__doc__.splitlines()[0],
                                     allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"purcellsim {__version__}")
    parser.add_argument("--config", help="key = value file supplying defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="amplitude trajectory as CSV")
    _add_model_flags(p)
    p.add_argument("--tmax", type=parse_duration, default=16.0)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--rtol", type=float, default=1e-10)

    p = sub.add_parser("efficiency", help="emission budget as JSON")
    _add_model_flags(p)
    p.add_argument("--method", default="steady", choices=["steady", "time", "analytic"])

    p = sub.add_parser("optimize", help="maximise efficiency over splittings")
    _add_model_flags(p, "two-level-biref")
    p.add_argument("--vary", default="delta-p")
    p.add_argument("--c", dest="cooperativity", type=float, default=None,
                   help="set rates from cooperativity (with g and --kappa-over-gamma)")
    p.add_argument("--kappa-over-gamma", type=float, default=None)
    p.add_argument("--objective", default="efficiency", choices=["efficiency", "window", "lossless"])
    p.add_argument("--window", type=parse_duration, default=8 * math.pi)
    p.add_argument("--box", default=None, help="lo:hi search range per parameter")
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("design", help="length x birefringence sweep as CSV")
    p.add_argument("--preset", default="takahashi")
    p.add_argument("--lengths", default=None, help="start:stop:count in micrometres")
    p.add_argument("--delta-p-mhz", default=None, help="start:stop:count, MHz/2pi")
    p.add_argument("--delta-p", default=None, help="start:stop:count in the preset's own unit")
    p.add_argument("--output", "-o", default="-")

    p = sub.add_parser("reproduce", help="data behind one figure, one CSV per panel")
    p.add_argument("figure")
    p.add_argument("--outdir", default=".")
    p.add_argument("--points", type=int, default=None, help="grid resolution override")
    return parser


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return
    cfg = read_config(known.config)
    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    command = next((a for a in rest if a in sub_action.choices), None)
    if command is None:
        return
    sp = sub_action.choices[command]
    by_dest = {a.dest: a for a in sp._actions}
    defaults = {}
    for key, value in cfg.items():
        if key not in by_dest:
            raise UsageError(f"config key {key!r} is not a flag of {command!r}")
        action = by_dest[key]
        defaults[key] = action.type(value) if action.type else value
    sp.set_defaults(**defaults)


def _rates(args) -> Rates:
    scale = 2 * math.pi if args.units == "mhz" else 1.0
    return Rates(**{k: scale * getattr(args, k) for k in RATE_FLAGS})


def _spec(args, rates=None) -> ModelSpec:
    return ModelSpec(Scheme.parse(args.scheme), rates or _rates(args), args.n, args.basis)


def _config_dict(args) -> dict:
    d = {k: v for k, v in vars(args).items() if k not in ("func",)}
    d["version"] = __version__
    return d


def _write_csv(path, header: dict, columns, rows):
    buf = io.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True, default=str) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow(["%.17g" % v if isinstance(v, (float, np.floating)) else v for v in row])
    _emit(path, buf.getvalue())


def _write_json(path, payload):
    _emit(path, json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")


def _emit(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_evolve(args):
    if args.tmax <= 0:
        raise UsageError("--tmax must be positive (empty time grid)")
    if args.samples is not None and args.samples < 2:
        raise UsageError("--samples must be at least 2 (empty time grid)")
    h = build(_spec(args))
    traj = evolve(h, t_max=args.tmax, rel_tol=args.rtol, n_samples=args.samples)
    cols = ["t"]
    for lab in h.labels:
        cols += [f"re_{lab}", f"im_{lab}", f"p_{lab}"]
    cols += ["p_cavity", "p_excited", "norm"]
    pops = traj.populations
    p_cav = traj.population(h.cavity_mask) if h.cavity_mask is not None else np.full(len(traj.times), np.nan)
    p_exc = traj.population(h.excited_mask) if h.excited_mask is not None else np.full(len(traj.times), np.nan)
    rows = []
    for k, t in enumerate(traj.times):
        row = [float(t)]
        for i in range(h.dim):
            a = traj.amplitudes[k, i]
            row += [float(a.real), float(a.imag), float(pops[k, i])]
        row += [float(p_cav[k]), float(p_exc[k]), float(traj.norm[k])]
        rows.append(row)
    _write_csv(args.output, _config_dict(args), cols, rows)


def cmd_efficiency(args):
    spec = _spec(args)
    rates = spec.rates
    if rates.kappa <= 0 and rates.gamma <= 0:
        raise NoDecayChannelError("kappa = gamma = 0: no decay channel, the excitation never leaves")
    if args.method == "analytic":
        if spec.scheme is not Scheme.TWO_LEVEL or rates.delta_c != 0:
            raise UsageError("--method analytic applies to the resonant two-level scheme only")
        eta = analytic_two_level_efficiency(rates.g, rates.kappa, rates.gamma)
        out = {"eta_ext": eta, "eta_free": 1.0 - eta, "residual": 0.0, "purity": 1.0,
               "err_est": 0.0, "method": "analytic"}
    else:
        h = build(spec)
        b = emission_budget_steady(h) if args.method == "steady" else emission_budget_timedomain(h)
        out = b.as_dict()
    out["config"] = _config_dict(args)
    _write_json(args.output, out)


def _parse_box(text, nvary):
    if text is None:
        return None
    parts = [float(x) for x in str(text).replace(",", ":").split(":")]
    if len(parts) == 2:
        return [tuple(parts)] * nvary
    if len(parts) == 2 * nvary:
        return [tuple(parts[i:i + 2]) for i in range(0, len(parts), 2)]
    raise UsageError(f"--box {text!r}: give lo:hi or one lo:hi pair per parameter")


def cmd_optimize(args):
    vary = [v.strip() for v in args.vary.split(",") if v.strip()]
    bad = [v for v in vary if v not in VARY_FIELDS]
    if bad or not 1 <= len(vary) <= 2:
        raise UsageError(f"--vary {args.vary!r}: choose one or two of delta-p, delta-z, omega, kappa")
    spec = _spec(args)
    if args.cooperativity is not None:
        r = args.kappa_over_gamma
        if r is None:
            r = 1 / math.sqrt(spec.multiplicity)
        base = Rates.from_cooperativity(args.cooperativity, r, g=spec.rates.g)
        spec = _spec(args, base.with_(**{k: getattr(spec.rates, k) for k in RATE_FLAGS[3:]}))
    box = _parse_box(args.box, len(vary))
    if args.objective == "efficiency":
        res = optimize_efficiency(spec, vary, box=box, tol=args.tol)
    elif args.objective == "window":
        res = optimize_window(spec, vary, args.window, box=box, tol=args.tol)
    else:
        res = optimize_lossless_average(spec, vary, box=box, tol=args.tol)
    out = res.as_dict()
    out["rates"] = spec.rates.as_dict()
    out["objective"] = args.objective
    out["config"] = _config_dict(args)
    _write_json(args.output, out)


def cmd_design(args):
    try:
        geom = PRESETS[args.preset]()
    except KeyError:
        raise UsageError(f"unknown preset {args.preset!r}; available: {', '.join(PRESETS)}") from None
    lengths = parse_grid(args.lengths) if args.lengths else np.linspace(0.5 * geom.l0, 2.5 * geom.l0, 41)
    if args.delta_p_mhz is not None:
        if geom.unit != "mhz":
            raise UsageError(f"preset {args.preset!r} is dimensionless; use --delta-p")
        dps = parse_grid(args.delta_p_mhz)
    elif args.delta_p is not None:
        dps = parse_grid(args.delta_p)
    else:
        dps = np.linspace(0, 3 * geom.g0, 41)
    if lengths.min() <= 0:
        raise UsageError("--lengths must be positive")
    rows = [list(r) for r in sweep_length_birefringence(geom, lengths, dps)]
    header = _config_dict(args)
    header["geometry"] = vars(geom)
    _write_csv(args.output, header, ["l_um", "delta_p", "eta_ext", "purity"], rows)


def cmd_reproduce(args):
    if args.figure not in FIGURES:
        raise UsageError(f"unknown figure {args.figure!r}; available: {', '.join(FIGURES)}")
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for panel in reproduce(args.figure, args.points):
        header = _config_dict(args)
        header.update(panel.meta)
        path = outdir / f"{panel.name}.csv"
        _write_csv(path, header, panel.columns, panel.rows)
        print(path)


COMMANDS = {
    "evolve": cmd_evolve,
    "efficiency": cmd_efficiency,
    "optimize": cmd_optimize,
    "design": cmd_design,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"purcellsim: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except (UsageError, ConfigurationError) as exc:
        print(f"purcellsim: error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        print(f"purcellsim: numerical failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"purcellsim: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
