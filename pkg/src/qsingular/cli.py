"""Command-line front end: every computation as a subcommand emitting CSV or JSON.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from importlib import metadata
from typing import Callable, Optional, Sequence

import numpy as np

from . import anholonomy, caustics, spectra, statforce, susy
from .errors import NumericalError
from .singularity import SingularityParams

OUTPUT_DIR_ENV = "QSINGULAR_OUTPUT_DIR"
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


class Table:
    """Result rows plus the column names and the parameter echo."""

    def __init__(self, columns: Sequence[str], rows: Sequence[Sequence], meta: Optional[dict] = None):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.meta = meta or {}


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(table: Table, command: str, params: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "command": command,
            "version": _version(),
            "parameters": {k: _json_value(v) for k, v in sorted(params.items())},
            "meta": {k: _json_value(v) for k, v in sorted(table.meta.items())},
            "columns": table.columns,
            "rows": [[_json_value(c) for c in r] for r in table.rows],
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# qsingular {_version()} {command}\n")
    for k, v in sorted(params.items()):
        buf.write(f"# {k}={_cell(v)}\n")
    for k, v in sorted(table.meta.items()):
        buf.write(f"# meta {k}={_cell(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow([_cell(c) for c in r])
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], list[list[str]]]:
    """Parse emitted CSV back into (columns, rows of strings), skipping '#' lines."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


# ---------------------------------------------------------------------------
# Argument helpers


def _length(s: str) -> float:
    """Float that also accepts 'inf'."""
    v = float(s)
    if math.isnan(v):
        raise argparse.ArgumentTypeError("nan is not a length")
    return v


_PI_FORM = re.compile(r"^\s*(?:([-+]?\d*\.?\d+(?:[eE][-+]?\d+)?)\s*\*?\s*)?pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def _angle(s: str) -> float:
    """Radians, given as a number or as an exact multiple of pi such as 'pi', '2pi', '3*pi/4'."""
    m = _PI_FORM.match(s)
    if m:
        c = float(m.group(1)) if m.group(1) else 1.0
        d = float(m.group(2)) if m.group(2) else 1.0
        if d == 0:
            raise argparse.ArgumentTypeError("division by zero")
        return c * math.pi / d
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {s!r}") from None


def _well(args) -> spectra.WellParams:
    p = SingularityParams(args.theta_plus, args.theta_minus, args.mu, args.nu, args.L0)
    return spectra.WellParams(args.l, p, args.hbar, args.mass)


def _add_singularity(p: argparse.ArgumentParser, theta_defaults=(0.0, math.pi)):
    p.add_argument("--theta-plus", type=_angle, default=theta_defaults[0], help="eigenphase theta+ in [0, 2pi)")
    p.add_argument("--theta-minus", type=_angle, default=theta_defaults[1], help="eigenphase theta- in [0, 2pi)")
    p.add_argument("--mu", type=_angle, default=math.pi / 2, help="isospectral angle mu in [0, pi]")
    p.add_argument("--nu", type=_angle, default=0.0, help="isospectral angle nu in [0, 2pi)")
    p.add_argument("--L0", type=float, default=1.0, help="reference length of the connection condition")


def _add_units(p: argparse.ArgumentParser):
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=1.0)


def _positive(name: str, v: float):
    if not v > 0:
        raise ValueError(f"{name} must be positive")


def _load_loop(path: str) -> anholonomy.LoopPath:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or set(doc) != {"space", "points"}:
        raise ValueError("loop file must be an object with exactly the keys 'space' and 'points'")
    pts = doc["points"]
    if not isinstance(pts, list) or not all(isinstance(q, list) and len(q) == 2 for q in pts):
        raise ValueError("'points' must be a list of [a, b] pairs")
    return anholonomy.LoopPath(tuple((float(a), float(b)) for a, b in pts), doc["space"])


# ---------------------------------------------------------------------------
# Subcommands


def cmd_spectrum(args) -> Table:
    if args.count < 1:
        raise ValueError("count must be positive")
    cols = ["index", "k", "energy", "parity", "series", "bound"]
    if args.sweep_points == 0:
        levels = spectra.well_spectrum(_well(args), args.count)[: args.count]
        return Table(cols, [[v.index, v.momentum_k, v.energy, v.parity, v.series, v.bound] for v in levels])
    if args.sweep_points < 2:
        raise ValueError("sweep-points must be 0 or >= 2")
    xs = np.linspace(args.sweep_min, args.sweep_max, args.sweep_points)
    rows = []
    for x in xs:
        p = SingularityParams.wrapped(args.theta_plus + x, args.theta_minus - x, args.mu, args.nu, args.L0)
        w = spectra.WellParams(args.l, p, args.hbar, args.mass)
        for v in spectra.well_spectrum(w, args.count)[: args.count]:
            rows.append([float(x), p.theta_plus, p.theta_minus, v.index, v.signed_momentum, v.energy, v.parity])
    return Table(["x", "theta_plus", "theta_minus", "index", "signed_k", "energy", "parity"], rows)


def cmd_line_bound(args) -> Table:
    p = SingularityParams(args.theta_plus, args.theta_minus, args.mu, args.nu, args.L0)
    levels = spectra.line_bound_states(p, args.hbar, args.mass)
    return Table(["index", "kappa", "energy", "parity", "series"],
                 [[v.index, v.momentum_k, v.energy, v.parity, v.series] for v in levels])


def _oscillator(args) -> spectra.OscillatorParams:
    if args.g is not None:
        return spectra.OscillatorParams(args.omega, args.g, args.hbar, args.mass)
    return spectra.OscillatorParams.from_a(args.a, args.omega, args.hbar, args.mass)


def cmd_calogero(args) -> Table:
    o = _oscillator(args)
    levels = spectra.calogero_spectrum(o, args.L_plus, args.L_minus, args.count, not args.scan)
    return Table(["index", "energy", "lambda", "series"],
                 [[v.index, v.energy, v.energy / (o.hbar * o.omega), v.series] for v in levels])


def cmd_loop_track(args) -> Table:
    if args.loop_file:
        loop = _load_loop(args.loop_file)
        if loop.space != anholonomy.TORUS:
            raise ValueError("loop-track needs a torus loop")
        if not loop.closed:
            raise ValueError("loop is not closed")
        pts = loop.array
    else:
        pts = spectra.torus_loop(args.kind, turns=args.turns, reverse=args.reverse, theta0=args.theta0)
    w = spectra.WellParams(args.l, SingularityParams(0.0, math.pi, math.pi / 2, 0.0, args.L0), args.hbar, args.mass)
    res = spectra.track_levels_along_loop(pts, w, args.levels, args.steps)
    meta = {"refinements": res.refinements}
    try:
        meta["common_shift"] = anholonomy.level_anholonomy_shift(res)
    except NumericalError as exc:
        meta["common_shift"] = f"none ({exc})"
    if args.trajectories:
        if args.samples < 1:
            raise ValueError("samples must be positive")
        last = len(res.thetas) - 1
        steps = sorted(set(np.linspace(0, last, min(args.samples, last) + 1).round().astype(int).tolist()))
        rows = []
        for i in steps:
            for j, traj in enumerate(res.trajectories):
                s = traj[i]
                rows.append([i, float(res.thetas[i][0]), float(res.thetas[i][1]), res.initial_indices[j],
                             res.channels[j], s, float(np.sign(s) * s * s)])
        return Table(["step", "theta_plus", "theta_minus", "level", "channel", "signed_k", "k2_signed"], rows, meta)
    rows = [[i, c, f, s] for i, c, f, s in zip(res.initial_indices, res.channels, res.final_indices, res.shifts)]
    return Table(["initial_index", "channel", "final_index", "shift"], rows, meta)


def cmd_berry(args) -> Table:
    if args.loop_file:
        loop = _load_loop(args.loop_file)
        ph = anholonomy.berry_phase_loop(loop)
        return Table(["raw", "reduced"], [[ph.raw, ph.reduced]])
    if args.stokes is not None:
        mu_a, mu_b = args.stokes
        a = anholonomy.constant_mu_loop(mu_a, points=args.points)
        b = anholonomy.constant_mu_loop(mu_b, points=args.points)
        return Table(["mu_a", "mu_b", "mesh", "stokes_residual"],
                     [[mu_a, mu_b, args.mesh, anholonomy.stokes_residual(a, b, args.mesh)]])
    ph = anholonomy.berry_phase_loop(anholonomy.constant_mu_loop(args.mu, points=args.points))
    exact = -math.pi * (1 + math.sin(args.mu))
    return Table(["mu", "raw", "reduced", "closed_form"], [[args.mu, ph.raw, ph.reduced, exact]])


def cmd_susy_check(args) -> Table:
    _positive("l", args.l)
    if args.mu_points < 1:
        raise ValueError("mu-points must be positive")
    mus = np.linspace(args.mu_min, args.mu_max, args.mu_points)
    if np.any(mus < 0) or np.any(mus > math.pi):
        raise ValueError("mu must lie in [0, pi]")
    rows = []
    for mu in mus:
        levels = susy.n1_susy_well_spectrum(float(mu), args.nu, args.l, (args.n_min, args.n_max),
                                            args.hbar, args.mass)
        for lv in levels[: args.count]:
            r = susy.n1_boundary_residual(float(mu), args.nu, lv.state)
            rows.append([float(mu), lv.level.index, lv.n, lv.k, lv.level.energy, r])
    return Table(["mu", "index", "n", "k", "energy", "boundary_residual"], rows)


def cmd_copy_sim(args) -> Table:
    _positive("sigma", args.sigma)
    o = spectra.OscillatorParams.from_a(args.a, args.omega)
    if args.k < 1:
        raise ValueError("k must be a positive integer")
    basis = caustics.ModeBasis.free_point(o, args.nmax)
    r = caustics.copy_simulation(caustics.gaussian_profile(args.x0, args.sigma), basis, args.k)
    return Table(["return_weight", "mirror_weight", "leakage", "predicted_return", "predicted_mirror",
                  "expansion_residual"],
                 [[r.measured_return_weight, r.measured_mirror_weight, r.leakage, r.predicted_return_weight,
                   r.predicted_mirror_weight, r.expansion_residual]])


def cmd_current(args) -> Table:
    _positive("sigma", args.sigma)
    o = spectra.OscillatorParams.from_a(args.a, args.omega)
    basis = caustics.ModeBasis.build(o, args.L_plus, args.L_minus, args.nmax)
    f = caustics.gaussian_profile(args.x0, args.sigma)
    lo = max(0.0, args.x0 - 8 * args.sigma)
    e = caustics.expand_function(f, basis, lo, args.x0 + 8 * args.sigma)
    rows = []
    for t in np.linspace(args.t_min, args.t_max, args.points):
        c = caustics.singularity_current(e, basis, float(t))
        rows.append([float(t), c.j_plus, c.j_minus, c.closed_form])
    return Table(["t", "j_plus", "j_minus", "closed_form"], rows, {"expansion_residual": e.residual})


def _t_grid(args) -> np.ndarray:
    _positive("t-min", args.t_min)
    if args.points < 1:
        raise ValueError("points must be positive")
    if args.points == 1:
        if args.t_max != args.t_min:
            raise ValueError("a single point needs t-max = t-min")
        return np.array([args.t_min])
    if not args.t_max > args.t_min:
        raise ValueError("t-max must exceed t-min")
    if args.spacing == "log":
        return np.geomspace(args.t_min, args.t_max, args.points)
    return np.linspace(args.t_min, args.t_max, args.points)


def cmd_force(args) -> Table:
    cfg = statforce.GasConfig(args.N, args.stat, 1.0, args.l)
    ts = _t_grid(args)
    methods = args.method.split(",")
    for m in methods:
        if m not in statforce.METHODS:
            raise ValueError(f"unknown method {m!r}")
        if cfg.statistics == statforce.FERMI and m not in ("exact", "asymptotic", "poisson"):
            raise ValueError(f"method {m!r} is derived for bosons only")
    cols = list(statforce.CSV_COLUMNS)
    if args.double_log:
        cols += ["log10_t", "log10_delta_F_dimless"]
    rows = []
    for m in methods:
        for p in statforce.force_curve(cfg, ts, m):
            row = list(p.csv_row())
            if args.double_log:
                d = p.dimensionless_delta_F
                row += [math.log10(p.t), math.log10(d) if d > 0 else math.nan]
            rows.append(row)
    return Table(cols, rows)


def cmd_force_min(args) -> Table:
    cfg = statforce.GasConfig(args.N, args.stat, 1.0, args.l)
    rng = None
    if args.t_lo is not None or args.t_hi is not None:
        lo, hi = statforce.default_min_range(cfg)
        rng = (args.t_lo if args.t_lo is not None else lo, args.t_hi if args.t_hi is not None else hi)
    m = statforce.find_force_minimum(cfg, rng)
    return Table(["t_min", "delta_F_min"], [[m.t_min, m.delta_F_min]])


def cmd_oracle(args) -> Table:
    w = _well(args)
    if args.levels < 1:
        raise ValueError("levels must be positive")
    roots = spectra.well_spectrum(w, args.levels)[: args.levels]
    fd = spectra.finite_difference_oracle(w, args.grid, args.levels)
    rows = []
    for r, o in zip(roots, fd):
        rel = abs(o.energy - r.energy) / max(abs(r.energy), 1e-300)
        rows.append([r.index, r.energy, o.energy, rel, r.parity, o.parity])
    return Table(["index", "energy_roots", "energy_oracle", "rel_error", "parity_roots", "parity_oracle"], rows)


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsingular", description="Quantum point singularities on a line.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", help=f"output file (relative paths resolve against ${OUTPUT_DIR_ENV})")
        p.add_argument("--config", help="JSON file of parameters; explicit flags take precedence")
        p.set_defaults(func=func)
        return p

    p = add("spectrum", cmd_spectrum, "Levels of an infinite well [-l, l] with the singularity at its centre.")
    _add_singularity(p)
    _add_units(p)
    p.add_argument("--l", type=float, default=1.0, help="half width of the well")
    p.add_argument("--count", type=int, default=8, help="number of lowest levels")
    p.add_argument("--sweep-points", type=int, default=0,
                   help="if >= 2, sweep x with (theta+, theta-) = (theta_plus + x, theta_minus - x)")
    p.add_argument("--sweep-min", type=float, default=-math.pi)
    p.add_argument("--sweep-max", type=float, default=math.pi)

    p = add("line-bound", cmd_line_bound, "Bound states of the singularity on the whole line.")
    _add_singularity(p, (math.pi / 2, math.pi / 3))
    _add_units(p)

    p = add("calogero", cmd_calogero, "Levels of the oscillator with an inverse-square core.")
    p.add_argument("--a", type=float, default=0.75, help="core strength a in [1/2, 1)")
    p.add_argument("--g", type=float, default=None, help="coupling g (overrides --a)")
    p.add_argument("--omega", type=float, default=1.0)
    _add_units(p)
    p.add_argument("--L-plus", dest="L_plus", type=_length, default=math.inf, help="scale length of the even channel")
    p.add_argument("--L-minus", dest="L_minus", type=_length, default=0.0, help="scale length of the odd channel")
    p.add_argument("--count", type=int, default=10, help="levels per channel")
    p.add_argument("--scan", action="store_true", help="root-scan even where closed forms exist")

    p = add("loop-track", cmd_loop_track, "Continue well levels around a loop on the spectral torus.")
    p.add_argument("--loop-file", help="JSON loop {space: torus, points: [[theta+, theta-], ...]}")
    p.add_argument("--kind", choices=("shifted", "self_dual", "constant"), default="shifted")
    p.add_argument("--turns", type=int, default=1)
    p.add_argument("--reverse", action="store_true")
    p.add_argument("--theta0", type=_angle, default=0.0)
    p.add_argument("--l", type=float, default=1.0)
    p.add_argument("--L0", type=float, default=1.0)
    _add_units(p)
    p.add_argument("--levels", type=int, default=6)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--trajectories", action="store_true", help="emit level curves instead of shifts")
    p.add_argument("--samples", type=int, default=200, help="trajectory rows per level")

    p = add("berry", cmd_berry, "Berry phase of scale-invariant well states on the isospectral sphere.")
    p.add_argument("--loop-file", help="JSON loop {space: sphere, points: [[mu, nu], ...]}")
    p.add_argument("--mu", type=_angle, default=math.pi / 4, help="constant-mu circle")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--stokes", type=float, nargs=2, metavar=("MU_A", "MU_B"),
                   help="compare two circles with the flux through the band between them")
    p.add_argument("--mesh", type=int, default=400)

    p = add("susy-check", cmd_susy_check, "Levels of the N = 1 supersymmetric well against mu.")
    p.add_argument("--mu-min", type=_angle, default=0.0)
    p.add_argument("--mu-max", type=_angle, default=math.pi)
    p.add_argument("--mu-points", type=int, default=61)
    p.add_argument("--nu", type=_angle, default=0.0)
    p.add_argument("--l", type=float, default=1.0)
    p.add_argument("--n-min", type=int, default=-4)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--count", type=int, default=6)
    _add_units(p)

    p = add("copy-sim", cmd_copy_sim, "Quantum copy of a Gaussian profile at a caustic time.")
    p.add_argument("--a", type=float, default=0.75)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--x0", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=0.4)
    p.add_argument("--nmax", type=int, default=200)
    p.add_argument("--omega", type=float, default=1.0)

    p = add("current", cmd_current, "Probability current through the singularity for an evolving Gaussian.")
    p.add_argument("--a", type=float, default=0.75)
    p.add_argument("--L-plus", dest="L_plus", type=_length, default=1.0)
    p.add_argument("--L-minus", dest="L_minus", type=_length, default=0.5)
    p.add_argument("--x0", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=0.4)
    p.add_argument("--nmax", type=int, default=20)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--t-min", type=float, default=0.5)
    p.add_argument("--t-max", type=float, default=1.5)
    p.add_argument("--points", type=int, default=3)

    p = add("force", cmd_force, "Net statistical force on a Dirichlet/Neumann partition wall.")
    p.add_argument("--stat", choices=(statforce.BOSE, statforce.FERMI), default=statforce.BOSE)
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--l", type=float, default=1.0)
    p.add_argument("--t-min", type=float, default=0.01)
    p.add_argument("--t-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--spacing", choices=("linear", "log"), default="linear")
    p.add_argument("--method", default="exact", help="comma-separated: " + ", ".join(statforce.METHODS))
    p.add_argument("--double-log", action="store_true", help="add log10 t and log10 Delta F columns")

    p = add("force-min", cmd_force_min, "Temperature of the net-force minimum.")
    p.add_argument("--stat", choices=(statforce.BOSE, statforce.FERMI), default=statforce.BOSE)
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--l", type=float, default=1.0)
    p.add_argument("--t-lo", type=float, default=None)
    p.add_argument("--t-hi", type=float, default=None)

    p = add("oracle", cmd_oracle, "Compare root-found well levels with the finite-difference oracle.")
    _add_singularity(p, (1.0, 2.0))
    _add_units(p)
    p.add_argument("--l", type=float, default=1.0)
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--grid", type=int, default=4000)
    return parser


_PLUMBING = {"func", "command", "format", "output", "config"}


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str], args) -> argparse.Namespace:
    """Re-parse with config-file values as defaults so explicit flags win."""
    with open(args.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in subparser._actions} - _PLUMBING - {"help"}
    values = {}
    for k, v in cfg.items():
        dest = k.lstrip("-").replace("-", "_")
        if dest not in known:
            raise ValueError(f"unknown config key {k!r} for {args.command}")
        values[dest] = v
    subparser.set_defaults(**values)
    return parser.parse_args(argv)


def _params(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in _PLUMBING}


def _resolve_output(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    try:
        if args.config:
            args = _apply_config(parser, argv, args)
        table = args.func(args)
        text = render(table, args.command, _params(args), args.format)
    except ArithmeticError as exc:
        # NumericalError and floating-point failures
        print(f"qsingular: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"qsingular: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.output:
        path = _resolve_output(args.output)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def dispatch(argv: Sequence[str]) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
