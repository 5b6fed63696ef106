"""Configuration-driven front end.

    nldiffusion {series,reference,identities,poisson-test,compare} --config run.ini --out outdir

The config is an INI file whose sections are the dotted prefixes of the
keys (``[series] order = 12`` is ``series.order``).  Values are Python
literals where that makes sense (numbers, lists, booleans).  Exit status:
0 all enabled checks pass, 1 a check failed, 2 bad config, 3 the run
diverged.
"""
from __future__ import annotations

import argparse
import ast
import configparser
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import fft

from . import __version__
from .diffusivity import Constant, model_from_params
from .errors import (
    ConfigError,
    InstabilityError,
    NonlinearityRequiredError,
    SeriesDivergenceError,
)
from .fieldio import write_csv, write_vtk
from .grid import Boundary, Grid3, laplacian
from .identities import EQUATIONS, convergence_order, run_suite
from .poisson import greens_direct, greens_fft
from .reference import Scheme, SolverConfig, compare, solve
from .scenarios import bump, initial_field
from .taylor import build_series, convergence_radius, evaluate, remainder_estimate

log = logging.getLogger("nldiffusion")

SUBCOMMANDS = ("series", "reference", "identities", "poisson-test", "compare")

SCHEMA = {
    "run": {"seed"},
    "grid": {"n", "nx", "ny", "nz", "h", "length", "origin", "boundary"},
    "diffusivity": {"kind", "D0", "m", "beta", "knots", "table_file", "c_ref", "c_min"},
    "initial": {"kind", "amplitude", "sigma", "background", "center", "radius", "inside",
                "outside", "epsilon", "mode", "axis", "mass", "t0", "front_radius", "path",
                "value", "power"},
    "series": {"order", "eval_times", "emit_coefficients"},
    "solver": {"scheme", "cfl_safety", "t_end", "snapshots"},
    "identities": {"equations", "refinement_levels", "snapshot_spacing", "snapshot_count",
                   "N", "min_order"},
    "poisson": {"direct_max_n", "tolerance", "min_order"},
    "compare": {"factor"},
    "output": {"directory", "formats", "report"},
}


@dataclass
class RunReport:
    subcommand: str
    config: dict
    version: str = __version__
    phases: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def check(self, name, passed, value, threshold, comparison="<="):
        if any(c["name"] == name for c in self.checks):
            raise ValueError(f"duplicate check {name!r}")
        self.checks.append({
            "name": name, "passed": bool(passed), "value": _jsonable(value),
            "threshold": _jsonable(threshold), "comparison": comparison,
        })

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def to_json(self):
        return json.dumps({
            "tool": "nldiffusion", "version": self.version, "subcommand": self.subcommand,
            "config": self.config, "phases_seconds": self.phases, "checks": self.checks,
            "metadata": self.metadata, "passed": self.passed,
        }, indent=2, default=_jsonable)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


class _Timer:
    def __init__(self, report, name):
        self.report, self.name = report, name

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.report.phases[self.name] = self.report.phases.get(self.name, 0.0) + (
            time.perf_counter() - self.t0
        )


# -- config -----------------------------------------------------------------
def _literal(text):
    low = text.strip().lower()
    if low in ("on", "yes", "true"):
        return True
    if low in ("off", "no", "false"):
        return False
    try:
        return ast.literal_eval(text.strip())
    except (ValueError, SyntaxError):
        return text.strip()


def load_config(path, strict=True):
    """Parse ``path`` into ``{section: {key: value}}``."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    cfg = {}
    for section in parser.sections():
        if section not in SCHEMA:
            if strict:
                line = _line_of(path, f"[{section}]")
                raise ConfigError(f"{path}:{line}: unknown section [{section}]")
            log.warning("ignoring unknown section [%s]", section)
            continue
        cfg[section] = {}
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                if strict:
                    line = _line_of(path, key, section)
                    raise ConfigError(f"{path}:{line}: unknown key {section}.{key}")
                log.warning("ignoring unknown key %s.%s", section, key)
                continue
            cfg[section][key] = _literal(raw)
    return cfg


def _line_of(path, needle, section=None):
    current = None
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            text = line.strip()
            if text.startswith("["):
                current = text.strip("[]").strip()
                if section is None and text == needle:
                    return n
            elif current == section and text.split("=")[0].split(":")[0].strip() == needle:
                return n
    return "?"


def _get(cfg, section, key, default=None):
    return cfg.get(section, {}).get(key, default)


def build_grid(cfg, n_override=None):
    g = cfg.get("grid", {})
    n = n_override or g.get("n")
    nx, ny, nz = (g.get(k, n) for k in ("nx", "ny", "nz")) if n_override is None else (n,) * 3
    if None in (nx, ny, nz):
        raise ConfigError("grid.n (or grid.nx/ny/nz) is required")
    boundary = Boundary(str(g.get("boundary", "free_decay")).lower())
    if "h" in g and n_override is None:
        h = float(g["h"])
    else:
        h = float(g.get("length", 1.0)) / nx
    if "origin" in g and n_override is None:
        origin = tuple(g["origin"])
    else:
        origin = tuple(-0.5 * m * h + 0.5 * h for m in (nx, ny, nz))
    return Grid3(int(nx), int(ny), int(nz), h, origin, boundary)


def build_model(cfg):
    params = dict(cfg.get("diffusivity", {"kind": "constant"}))
    if "knots" in params:
        params["knots"] = tuple(tuple(k) for k in params["knots"])
    return model_from_params(params)


def build_initial(cfg, grid, model):
    params = dict(cfg.get("initial", {"kind": "gaussian"}))
    kind = params.pop("kind", "gaussian")
    if "center" in params:
        params["center"] = tuple(params["center"])
    return initial_field(grid, model, kind, **params)


# -- output -----------------------------------------------------------------
class _Writer:
    def __init__(self, out_dir, cfg):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        formats = _get(cfg, "output", "formats", ["csv"])
        self.formats = [formats] if isinstance(formats, str) else list(formats)

    def field(self, name, values, grid):
        if "csv" in self.formats:
            write_csv(self.dir / f"{name}.csv", values, grid)
        if "vtk" in self.formats:
            write_vtk(self.dir / f"{name}.vtk", values, grid, name=name)

    def table(self, name, header, rows):
        with open(self.dir / name, "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


# -- subcommands -------------------------------------------------------------
def _series(cfg, writer, report):
    grid, model = build_grid(cfg), build_model(cfg)
    c0, _ = build_initial(cfg, grid, model)
    order = int(_get(cfg, "series", "order", 12))
    with _Timer(report, "build_series"):
        state = build_series(c0, model, grid, order)
    norms = [float(np.max(np.abs(a))) for a in state.a]
    report.metadata["coefficient_linf"] = norms
    report.metadata["clamped_cells"] = state.clamped_cells
    radius = convergence_radius(state) if order >= 4 else None
    report.metadata["convergence_radius"] = radius
    # each a_{n+1} must satisfy the order-n recurrence to round-off
    coupling = 0.0
    for n in range(order + 1):
        lhs = (n + 1) * state.a[n + 1]
        scale = float(np.max(np.abs(lhs)))
        if scale > 0:
            coupling = max(coupling, float(np.max(np.abs(lhs - laplacian(state.f[n], grid)))) / scale)
    report.check("order_coupling", coupling <= 1e-12, coupling, 1e-12)
    if all(v == 0.0 for v in norms[1:]):
        report.metadata["stationary"] = True
    times = _get(cfg, "series", "eval_times", [])
    rows = []
    with _Timer(report, "evaluate"):
        for t in times:
            c = evaluate(state, float(t))
            rem = remainder_estimate(state, float(t))
            rows.append((float(t), float(np.max(np.abs(c))), rem.linf, rem.next_term_linf))
            writer.field(f"series_t{len(rows) - 1:03d}", c, grid)
    writer.table("series_times.csv", ["t", "linf", "remainder_linf", "next_term_linf"], rows)
    if _get(cfg, "series", "emit_coefficients", False):
        for n, a in enumerate(state.a):
            writer.field(f"coefficient_a{n:02d}", a, grid)


def _reference(cfg, writer, report):
    grid, model = build_grid(cfg), build_model(cfg)
    c0, analytic = build_initial(cfg, grid, model)
    t_end = float(_get(cfg, "solver", "t_end", 0.0))
    if t_end <= 0:
        raise ConfigError("solver.t_end must be a positive time")
    snaps = _get(cfg, "solver", "snapshots", None)
    if isinstance(snaps, int):
        snaps = list(np.linspace(0.0, t_end, snaps))
    conf = SolverConfig(t_end, tuple(snaps or (0.0, t_end)),
                        float(_get(cfg, "solver", "cfl_safety", 0.5)),
                        Scheme(_get(cfg, "solver", "scheme", "explicit_flux_form")))
    with _Timer(report, "solve"):
        traj = solve(c0, model, grid, conf)
    report.metadata["solver"] = traj.meta
    for k, f in enumerate(traj.fields):
        writer.field(f"reference_t{k:03d}", f, grid)
    if conf.scheme is Scheme.EXPLICIT_FLUX_FORM and conf.cfl_safety <= 0.5 and c0.min() >= 0:
        floor = -1e-12 * float(np.max(c0))
        report.check("positivity", traj.meta["min_value"] >= floor, traj.meta["min_value"],
                     floor, ">=")
    if grid.boundary is Boundary.PERIODIC:
        dv = grid.cell_volume
        m0 = float(np.sum(c0)) * dv
        drift = max(abs(float(np.sum(f)) * dv - m0) for f in traj.fields) / abs(m0)
        report.check("mass_conservation", drift <= 1e-12, drift, 1e-12)
    if analytic is not None:
        rows = compare(traj, analytic)
        writer.table("reference_vs_analytic.csv",
                     ["t", "l1", "l2", "linf", "rel_l1", "rel_l2", "rel_linf", "mass_drift"],
                     [(r.t, r.l1, r.l2, r.linf, r.rel_l1, r.rel_l2, r.rel_linf, r.mass_drift)
                      for r in rows])
        worst = max(r.rel_l1 for r in rows)
        report.check("analytic_rel_l1", worst <= 0.05, worst, 0.05)


def _identities(cfg, writer, report):
    model = build_model(cfg)
    equations = list(_get(cfg, "identities", "equations", EQUATIONS))
    levels = int(_get(cfg, "identities", "refinement_levels", 2))
    ds = float(_get(cfg, "identities", "snapshot_spacing", 5e-4))
    count = int(_get(cfg, "identities", "snapshot_count", 4))
    N = int(_get(cfg, "identities", "N", 1))
    min_order = float(_get(cfg, "identities", "min_order", 1.8))
    cfl = float(_get(cfg, "solver", "cfl_safety", 0.5))
    base = build_grid(cfg)
    skipped = {}
    rows, by_level = [], []
    for lev in range(levels):
        grid = Grid3.centered(base.nx * 2**lev, base.nx * base.h, base.boundary)
        c0, _ = build_initial(cfg, grid, model)
        k = count * 2**lev
        times = tuple(np.arange(k + 1) * (ds / 2**lev))
        with _Timer(report, "solve"):
            traj = solve(c0, model, grid, SolverConfig(times[-1], times, cfl))
        reps = {}
        with _Timer(report, "residuals"):
            for eq in equations:
                if eq in skipped:
                    continue
                try:
                    reps[eq] = run_suite(traj, [eq], N=N)[0]
                except NonlinearityRequiredError as exc:
                    # not applicable to this diffusivity: disabled, not failed
                    skipped[eq] = str(exc)
                    for prev in by_level:
                        prev.pop(eq, None)
        by_level.append(reps)
        for eq, rep in reps.items():
            order = convergence_order(by_level[-2][eq], rep) if lev > 0 else float("nan")
            rows.append((rep.equation, rep.t, rep.h, rep.dt, rep.norm_l2, rep.norm_linf,
                         rep.normalization, order))
            if lev == levels - 1 and "vtk" in writer.formats:
                write_vtk(writer.dir / f"residual_{eq}.vtk", rep.field, grid, name=eq)
    rows = [r for r in rows if r[0] not in skipped]
    writer.table("identities.csv", ["equation", "t", "h", "dt", "norm_l2", "norm_linf",
                                    "normalization", "order_estimate"], rows)
    report.metadata["skipped_equations"] = skipped
    if levels >= 2:
        for eq in by_level[-1]:
            order = convergence_order(by_level[-2][eq], by_level[-1][eq])
            report.check(f"order_{eq}", order >= min_order, order, min_order, ">=")


def _poisson_test(cfg, writer, report):
    grid = build_grid(cfg)
    if grid.boundary is not Boundary.FREE_DECAY:
        raise ConfigError("poisson-test needs grid.boundary = free_decay")
    rng = np.random.default_rng(int(_get(cfg, "run", "seed", 42)))
    r = grid.radius()
    sigma = 0.12 * grid.nx * grid.h
    k = np.exp(-(r**2) / sigma**2) * (1.0 + 0.5 * rng.standard_normal(grid.shape))
    with _Timer(report, "fft"):
        sol_fft = greens_fft(k, grid)
    writer.field("poisson_V", sol_fft.V, grid)
    writer.field("poisson_source", k, grid)
    tol = float(_get(cfg, "poisson", "tolerance", 1e-10))
    if grid.nx <= int(_get(cfg, "poisson", "direct_max_n", 20)):
        with _Timer(report, "direct"):
            sol_dir = greens_direct(k, grid)
        diff = float(np.max(np.abs(sol_fft.V - sol_dir.V)) / np.max(np.abs(sol_dir.V)))
        report.check("direct_vs_fft", diff <= tol, diff, tol)
    res = []
    with _Timer(report, "convergence"):
        for g in (grid, grid.refine()):
            src = bump(g, radius=0.45 * g.nx * g.h)
            sol = greens_fft(src, g)
            res.append(sol.residual_linf / float(np.max(np.abs(src))))
            writer.field(f"poisson_residual_n{g.nx}", laplacian(sol.V, g) + src, g)
    order = math.log2(res[0] / res[1])
    report.metadata["residual_rel_linf"] = res
    min_order = float(_get(cfg, "poisson", "min_order", 1.8))
    report.check("residual_order", order >= min_order, order, min_order, ">=")


def _compare(cfg, writer, report):
    grid, model = build_grid(cfg), build_model(cfg)
    c0, _ = build_initial(cfg, grid, model)
    order = int(_get(cfg, "series", "order", 12))
    with _Timer(report, "build_series"):
        state = build_series(c0, model, grid, order)
    times = _get(cfg, "series", "eval_times", None)
    if not times:
        times = [convergence_radius(state) / 4.0]
    times = sorted(float(t) for t in times)
    cfl = float(_get(cfg, "solver", "cfl_safety", 0.5))
    scheme = Scheme(_get(cfg, "solver", "scheme", "explicit_flux_form"))
    with _Timer(report, "solve"):
        ref = solve(c0, model, grid, SolverConfig(times[-1], tuple(times), cfl, scheme))
        ref_fine = solve(c0, model, grid, SolverConfig(times[-1], tuple(times), cfl / 2, scheme))
    factor = float(_get(cfg, "compare", "factor", 10.0))
    rows = []
    for k, t in enumerate(times):
        c = evaluate(state, t)
        err = float(np.max(np.abs(c - ref.fields[k])))
        rem = remainder_estimate(state, t).linf
        # forward Euler: halving the step halves the error
        disc = float(np.max(np.abs(ref.fields[k] - ref_fine.fields[k])))
        bound = factor * max(rem, disc)
        rel_l2 = float(np.linalg.norm(c - ref.fields[k]) / np.linalg.norm(ref.fields[k]))
        rows.append((t, err, rel_l2, rem, disc, bound))
        report.check(f"series_vs_reference_t{k}", err <= bound, err, bound)
        writer.field(f"compare_diff_t{k:03d}", c - ref.fields[k], grid)
    writer.table("compare.csv", ["t", "linf", "rel_l2", "remainder_linf",
                                 "reference_error_linf", "bound"], rows)


_HANDLERS = {
    "series": _series,
    "reference": _reference,
    "identities": _identities,
    "poisson-test": _poisson_test,
    "compare": _compare,
}


def run(config_path, subcommand, out_dir=None, threads=0, strict=True):
    """Run one subcommand; returns ``(exit_status, report or None)``."""
    if subcommand not in _HANDLERS:
        raise ValueError(f"unknown subcommand {subcommand!r}")
    try:
        cfg = load_config(config_path, strict=strict)
        out_dir = out_dir or _get(cfg, "output", "directory", "out")
        writer = _Writer(out_dir, cfg)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2, None
    report = RunReport(subcommand, cfg)
    workers = threads if threads > 0 else (os.cpu_count() or 1)
    try:
        with fft.set_workers(workers):
            _HANDLERS[subcommand](cfg, writer, report)
    except (ConfigError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2, None
    except (SeriesDivergenceError, InstabilityError) as exc:
        print(f"run diverged: {exc}", file=sys.stderr)
        report.metadata["divergence"] = str(exc)
        _write_report(writer, cfg, report)
        return 3, report
    _write_report(writer, cfg, report)
    for c in report.checks:
        log.info("%s %s: %s (threshold %s)", "PASS" if c["passed"] else "FAIL",
                 c["name"], c["value"], c["threshold"])
    return (0 if report.passed else 1), report


def _write_report(writer, cfg, report):
    if _get(cfg, "output", "report", True):
        (writer.dir / "report.json").write_text(report.to_json())


def main(argv=None):
    ap = argparse.ArgumentParser(prog="nldiffusion", description=__doc__.splitlines()[0])
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", required=True)
    ap.add_argument("--out", default=None, help="output directory (overrides output.directory)")
    ap.add_argument("--threads", type=int, default=0, help="FFT worker threads, 0 = auto")
    ap.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True,
                    help="reject unknown config keys (default on)")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    status, _ = run(args.config, args.subcommand, args.out, args.threads, args.strict)
    return status


if __name__ == "__main__":
    sys.exit(main())
