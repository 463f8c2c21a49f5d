"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 numerical failure.

Settings come from (lowest to highest priority) built-in defaults, a flat
``key=value`` file given by ``--config``, and command-line flags. The default
output directory can be set with ``BJJLAB_OUTPUT_DIR``.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .approx import BracketError
from .csvio import DEFAULT_PRECISION, Table, dumps, format_float, result_table
from .csvio import write_text_atomic
from .eigensolve import ConvergenceError, diagonalize
from .model import JunctionParams, build_hamiltonian, single_atom_resonances
from .observables import coherence_stats, number_stats
from .svgplot import line_plot
from .sweep import (
    AXES,
    FIGURES,
    QUANTITIES,
    SweepError,
    SweepSpec,
    detect_resonances,
    figure_recipe,
    make_grid,
    run_sweep,
)
from .thermal import thermal_coherence, thermal_number

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
OUTPUT_ENV = "BJJLAB_OUTPUT_DIR"

DEFAULTS = {
    "n": None,
    "j": 1.0,
    "ec": 0.0,
    "delta": 0.0,
    "beta": None,
    "temperature": None,
    "precision": DEFAULT_PRECISION,
    "axis": None,
    "start": None,
    "stop": None,
    "count": None,
    "spacing": "linear",
    "values": None,
    "quantities": "var_cos,mean_cos,inv_s_squared,mean_nr,var_nr",
    "x_scale": 1.0,
    "name": "sweep",
    "detect": False,
    "workers": 1,
    "grid": None,
    "temps": None,
    "plot": False,
    "out": None,
}

CONVERTERS = {
    "n": int, "j": float, "ec": float, "delta": float, "beta": float, "temperature": float,
    "precision": int, "start": float, "stop": float, "count": int, "x_scale": float,
    "workers": int, "grid": int,
    "detect": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
    "plot": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}


class UsageError(Exception):
    pass


def read_config(path) -> dict:
    """Flat ``key=value`` file; ``#`` starts a comment; dashes in keys allowed."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        conv = CONVERTERS.get(key, str)
        try:
            out[key] = conv(value)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return out


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}: {exc}") from None


def _add_junction(p):
    p.add_argument("--n", type=int, help="total atom number N")
    p.add_argument("--j", type=float, help="tunneling strength J (default 1)")
    p.add_argument("--ec", type=float, help="charging energy E_C (default 0)")
    p.add_argument("--delta", type=float, help="asymmetry delta (default 0)")
    p.add_argument("--beta", type=float, help="inverse temperature 1/(k_B T)")
    p.add_argument("--temperature", type=float, help="k_B T in energy units")
    p.add_argument("--precision", type=int, help="significant digits in CSV output (default 12)")
    p.add_argument("--config", help="key=value settings file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bjjlab", description="Exact diagonalization of the two-mode Bose-Josephson junction.")
    parser.add_argument("--version", action="version", version=f"bjjlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", help="observables at one parameter point")
    _add_junction(p)

    p = sub.add_parser("sweep", help="1-D parameter sweep to CSV")
    _add_junction(p)
    p.add_argument("--axis", choices=AXES)
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--spacing", choices=("linear", "log"))
    p.add_argument("--values", help="explicit comma-separated axis values")
    p.add_argument("--quantities", help=f"comma-separated subset of {','.join(QUANTITIES)}")
    p.add_argument("--x-scale", dest="x_scale", type=float, help="divide axis values by this for the x column")
    p.add_argument("--name", help="output file stem")
    p.add_argument("--detect", action="store_const", const=True, help="write <name>.resonances.csv (delta axis)")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="output directory")

    p = sub.add_parser("figure", help="reproduce a figure as CSV (and optional SVG)")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--grid", type=int, help="grid resolution override")
    p.add_argument("--temps", help="comma-separated k_B T values (fig5)")
    p.add_argument("--plot", action="store_const", const=True, help="also write SVG panels and a plot script")
    p.add_argument("--out", help="output directory")
    p.add_argument("--precision", type=int)
    p.add_argument("--config", help="key=value settings file")
    return parser


def resolve(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    explicit = {k: v for k, v in vars(args).items() if v is not None and k in DEFAULTS}
    cfg.update(explicit)
    cfg["_explicit"] = set(explicit)
    if cfg["out"] is None:
        cfg["out"] = os.environ.get(OUTPUT_ENV, ".")
    if cfg["precision"] < 1 or cfg["precision"] > 17:
        raise UsageError("precision must be between 1 and 17")
    return cfg


def _beta(cfg) -> float | None:
    if cfg["beta"] is not None and cfg["temperature"] is not None:
        raise UsageError("give either --beta or --temperature, not both")
    if cfg["temperature"] is not None:
        if not cfg["temperature"] > 0:
            raise UsageError("temperature must be positive")
        return 1.0 / cfg["temperature"]
    if cfg["beta"] is not None and cfg["beta"] < 0:
        raise UsageError("beta must be >= 0")
    return cfg["beta"]


def _params(cfg) -> JunctionParams:
    if cfg["n"] is None:
        raise UsageError("--n is required")
    try:
        return JunctionParams(cfg["n"], cfg["j"], cfg["ec"], cfg["delta"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_point(cfg, stdout) -> int:
    params = _params(cfg)
    beta = _beta(cfg)
    spec = diagonalize(build_hamiltonian(params))
    ground = spec.eigenvectors[:, 0]
    coh = coherence_stats(ground, params.n_total)
    num = number_stats(ground, params.n_total)
    columns = ["energy", "var_cos", "mean_cos", "inv_s_squared", "mean_nr", "var_nr"]
    row = [spec.eigenvalues[0], coh.var_cos, coh.mean_cos, num.inv_s_squared, num.mean_nr, num.var_nr]
    if beta is not None:
        tc = thermal_coherence(params, spec, beta)
        tn = thermal_number(params, spec, beta)
        columns += ["thermal_var_cos", "thermal_mean_cos", "thermal_inv_s_squared",
                    "thermal_mean_nr", "thermal_var_nr"]
        row += [tc.var_cos, tc.mean_cos, tn.inv_s_squared, tn.mean_nr, tn.var_nr]
    stdout.write(dumps(Table(columns, [row]), cfg["precision"]))
    return EXIT_OK


def _sweep_spec(cfg) -> SweepSpec:
    axis = cfg["axis"]
    if axis is None:
        raise UsageError("--axis is required")
    explicit = cfg["_explicit"]
    fixed_flag = {"ec": "ec", "delta": "delta", "n": "n", "beta": "beta"}[axis]
    if fixed_flag in explicit or (axis == "beta" and "temperature" in explicit):
        raise UsageError(f"--{fixed_flag} conflicts with --axis {axis}")
    quantities = tuple(q.strip() for q in (cfg["quantities"] or "").split(",") if q.strip())
    if not quantities:
        raise UsageError("quantity list is empty")
    unknown = [q for q in quantities if q not in QUANTITIES]
    if unknown:
        raise UsageError(f"unknown quantities: {','.join(unknown)}")
    if cfg["values"] is not None:
        if any(cfg[k] is not None for k in ("start", "stop", "count")):
            raise UsageError("--values conflicts with --start/--stop/--count")
        values = tuple(_float_list(cfg["values"]))
    else:
        if any(cfg[k] is None for k in ("start", "stop", "count")):
            raise UsageError("give --values or all of --start, --stop, --count")
        try:
            values = make_grid(cfg["start"], cfg["stop"], cfg["count"], cfg["spacing"])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if axis == "n":
        cfg = dict(cfg, n=int(values[0]))
    params = _params(cfg)
    beta = math.inf
    if axis != "beta":
        b = _beta(cfg)
        beta = math.inf if b is None else b
    if cfg["detect"] and axis != "delta":
        raise UsageError("--detect needs --axis delta")
    if cfg["detect"] and not {"var_nr", "var_cos"}.intersection(quantities):
        raise UsageError("--detect needs var_nr or var_cos among the quantities")
    try:
        return SweepSpec(axis, values, params, quantities, beta=beta, x_scale=cfg["x_scale"],
                         name=cfg["name"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def resonance_table(result, quantity: str) -> Table:
    """Detected positions next to the nearest predicted single-atom resonance."""
    detected = detect_resonances(result, quantity)
    lo, hi = sorted((result.axis_values[0], result.axis_values[-1]))
    predicted = []
    if result.spec.base.charging_ec > 0:
        predicted = [d for d in single_atom_resonances(result.spec.base) if lo <= d <= hi]
    rows = []
    unused = list(detected)
    for p in predicted:
        if unused:
            best = min(unused, key=lambda d: abs(d - p))
            if abs(best - p) <= 0.5 * result.spec.base.charging_ec:
                unused.remove(best)
                rows.append([p, best, best - p])
                continue
        rows.append([p, math.nan, math.nan])
    rows += [[math.nan, d, math.nan] for d in unused]
    rows.sort(key=lambda r: r[0] if not math.isnan(r[0]) else r[1])
    meta = dict(result.metadata)
    meta["detector_quantity"] = quantity
    return Table(["predicted_delta", "detected_delta", "offset"], rows, meta)


def cmd_sweep(cfg) -> int:
    spec = _sweep_spec(cfg)
    result = run_sweep(spec, workers=max(1, cfg["workers"]))
    out = Path(cfg["out"])
    files = {out / f"{spec.name}.csv": dumps(result_table(result), cfg["precision"])}
    if cfg["detect"]:
        quantity = "var_nr" if "var_nr" in spec.quantities else "var_cos"
        files[out / f"{spec.name}.resonances.csv"] = dumps(resonance_table(result, quantity), cfg["precision"])
    _write_all(files)
    return EXIT_OK


def _write_all(files: dict):
    """Write every file or none: contents are rendered before the first write."""
    written = []
    try:
        for path, text in files.items():
            write_text_atomic(path, text)
            written.append(path)
    except BaseException:
        for path in written:
            try:
                os.unlink(path)
            except OSError:
                pass
        raise


_PANEL_AXES = {
    ("fig1", "a"): ("E_C/E_J", "Delta(cos phi)", True, False),
    ("fig1", "b"): ("N^2 E_C/E_J", "1/S^2", True, False),
    ("fig2", "a"): ("delta/E_J", "Delta(cos phi)", False, False),
    ("fig2", "b"): ("delta/E_J", "1/S^2", False, False),
    ("fig3", "a"): ("delta/E_C", "Delta(cos phi)", False, False),
    ("fig4", "a"): ("delta/E_C", "Delta(N_r)", False, False),
    ("fig4", "b"): ("delta/E_C", "<N_r>/2", False, False),
    ("fig5", "a"): ("E_C/E_J", "Delta(cos phi)", True, False),
    ("fig5", "spacing"): ("E_C/E_J", "mean level spacing", True, True),
}


def _plot_script(fig_id: str, names: list[str]) -> str:
    lines = [
        "# Convenience script: replot the CSVs written next to it with matplotlib.",
        "import csv, pathlib",
        "import matplotlib.pyplot as plt",
        "",
        "here = pathlib.Path(__file__).parent",
        "",
        "def load(name):",
        "    with open(here / name) as fh:",
        "        rows = [r for r in csv.reader(l for l in fh if not l.startswith('#'))]",
        "    header, body = rows[0], rows[1:]",
        "    return header, [[float(v) for v in r] for r in body]",
        "",
        "fig, ax = plt.subplots()",
        f"for name in {names!r}:",
        "    header, body = load(name)",
        "    ax.plot([r[1] for r in body], [r[2] for r in body], label=name)",
        "ax.legend(fontsize='small')",
        f"fig.savefig(here / '{fig_id}_replot.png', dpi=150)",
        "",
    ]
    return "\n".join(lines)


def cmd_figure(cfg) -> int:
    fig_id = cfg["figure"]
    temps = _float_list(cfg["temps"]) if cfg["temps"] else None
    if temps is not None and fig_id != "fig5":
        raise UsageError("--temps only applies to fig5")
    if temps is not None and any(not t > 0 for t in temps):
        raise UsageError("temperatures must be positive")
    if cfg["grid"] is not None and cfg["grid"] < 2:
        raise UsageError("--grid must be >= 2")
    results = figure_recipe(fig_id, grid=cfg["grid"], temps=temps)
    out = Path(cfg["out"])
    files = {}
    for res in results:
        files[out / f"{fig_id}_{res.spec.name}.csv"] = dumps(result_table(res), cfg["precision"])
    if cfg["plot"]:
        panels: dict[str, list] = {}
        for res in results:
            panels.setdefault(res.spec.panel, []).append(res)
        for panel, members in panels.items():
            xlabel, ylabel, xlog, ylog = _PANEL_AXES.get((fig_id, panel), ("x", "", False, False))
            curves = [(r.spec.name, r.x, r.data[:, 2]) for r in members]
            svg = line_plot(curves, title=f"{fig_id} ({panel})", xlabel=xlabel, ylabel=ylabel,
                            xlog=xlog, ylog=ylog)
            files[out / f"{fig_id}_{panel}.svg"] = svg
        names = [f"{fig_id}_{r.spec.name}.csv" for r in results]
        files[out / f"{fig_id}_plot.py"] = _plot_script(fig_id, names)
    _write_all(files)
    return EXIT_OK


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = resolve(args)
        cfg["figure"] = getattr(args, "figure", None)
        if args.command == "point":
            return cmd_point(cfg, stdout)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        return cmd_figure(cfg)
    except UsageError as exc:
        stderr.write(f"bjjlab: error: {exc}\n")
        return EXIT_USAGE
    except (ConvergenceError, BracketError, SweepError, FloatingPointError) as exc:
        stderr.write(f"bjjlab: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        stderr.write(f"bjjlab: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
