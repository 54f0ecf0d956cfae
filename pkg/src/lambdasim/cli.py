"""``lambda-sim`` command-line front end.

Usage::

    lambda-sim <mode> [--config PATH] [--key=value ...] [--out DIR]

Writes CSV grids (``t_over_tau,z_cm,value``), a JSON metrics report and a
``run.manifest`` echoing the resolved configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional

import numpy as np

from .adiabatic import predict_peak_depth, predicted_fwhm, recurrence_markers, solve_adiabatic
from .analysis import (
    compare_engines,
    extract_grids,
    flux_deviation,
    measure_fwhm,
    peak_coherence,
    identify_fwhm,
    regenerated_window,
)
from .config import MODES, RunConfig, parse_config, sweep_runs, to_manifest
from .errors import ConfigError, LambdaSimError, MeasurementError
from .integrator import propagate
from .model import SolutionGrid

log = logging.getLogger("lambdasim")

MANIFEST = "run.manifest"
METRICS = "metrics.json"

_FLAG = re.compile(r"^--([A-Za-z0-9_\-]+)=(.*)$")


def _clean(value):
    """JSON-safe copy: non-finite floats become null."""
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def write_grid(path: Path, sol: SolutionGrid, quantity: str, every_t: int = 1, every_z: int = 1) -> None:
    """CSV with header ``t_over_tau,z_cm,value``, rows ordered by z then t."""
    t, z, values = extract_grids(sol, quantity)
    t, z, values = t[::every_t], z[::every_z], values[::every_z, ::every_t]
    zz, tt = np.meshgrid(z, t, indexing="ij")
    table = np.column_stack([tt.ravel(), zz.ravel(), values.ravel()])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t_over_tau,z_cm,value\n")
        np.savetxt(fh, table, fmt="%.9g", delimiter=",")


def solution_metrics(sol: SolutionGrid) -> dict:
    p = sol.params
    peak, z_peak, t_peak = peak_coherence(sol)
    metrics = {
        "engine": sol.engine,
        "norm_residual": sol.norm_residual(),
        "flux_deviation": flux_deviation(sol),
        "peak_a3": peak,
        "peak_a3_depth": z_peak,
        "peak_a3_time": t_peak,
        "peak_depth_predicted": predict_peak_depth(p),
        "predicted_fwhm": None,
        "measured_fwhm_amplitude": None,
        "measured_fwhm_intensity": None,
        "fwhm_identification": None,
        "markers": None,
    }
    if p.has_recurrence:
        metrics["predicted_fwhm"] = predicted_fwhm(p)
        metrics["markers"] = recurrence_markers(p, p.z_max, sol.grid).as_dict()
        try:
            amp, inten = measure_fwhm(sol, p.z_max, regenerated_window(sol, p.z_max))
            metrics["measured_fwhm_amplitude"] = amp
            metrics["measured_fwhm_intensity"] = inten
            metrics["fwhm_identification"] = identify_fwhm(amp, inten, metrics["predicted_fwhm"])
        except MeasurementError as exc:
            log.warning("regenerated pulse width not measured: %s", exc)
    return metrics


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_clean(payload), indent=2) + "\n", encoding="utf-8")


def _write_grids(out: Path, sol: SolutionGrid, config: RunConfig, prefix: str = "") -> None:
    for q in config.quantities:
        write_grid(out / f"{prefix}{q}.csv", sol, q, config.export_every_t, config.export_every_z)


def _run_single(config: RunConfig) -> None:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    p, g, s = config.params, config.grid, config.settings
    if config.mode == "adiabatic":
        sol = solve_adiabatic(p, g)
        _write_grids(out, sol, config)
        _write_json(out / METRICS, solution_metrics(sol))
    elif config.mode == "numeric":
        sol = propagate(p, g, s)
        _write_grids(out, sol, config)
        _write_json(out / METRICS, solution_metrics(sol))
    elif config.mode == "compare":
        numeric = propagate(p, g, s)
        adiabatic = solve_adiabatic(p, g)
        report = compare_engines(p, g, s, numeric=numeric, adiabatic=adiabatic)
        _write_grids(out, adiabatic, config, prefix="adiabatic_")
        _write_grids(out, numeric, config, prefix="numeric_")
        _write_json(out / METRICS, report.as_dict())
    else:
        raise ConfigError(f"mode: {config.mode!r} is not a single-run mode")
    (out / MANIFEST).write_text(to_manifest(config), encoding="utf-8")


def _sweep_worker(config: RunConfig) -> dict:
    try:
        _run_single(config)
        return {"out": config.out, "status": "ok", "error": None}
    except LambdaSimError as exc:
        return {"out": config.out, "status": "error", "error": f"{type(exc).__name__}: {exc}"}


def run(config: RunConfig) -> int:
    """Execute ``config``; returns the process exit status."""
    out = Path(config.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: out: cannot create {str(out)!r}: {exc}", file=sys.stderr)
        return 2
    if config.mode != "sweep":
        try:
            _run_single(config)
        except LambdaSimError as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 1
        return 0

    runs = sweep_runs(config)
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_sweep_worker, runs))
    else:
        results = [_sweep_worker(r) for r in runs]
    summary = {
        "sweep_param": config.sweep_param,
        "runs": [dict(value=v, **r) for v, r in zip(config.sweep_values, results)],
    }
    _write_json(out / "sweep.json", summary)
    (out / MANIFEST).write_text(to_manifest(config), encoding="utf-8")
    failed = [r for r in results if r["status"] != "ok"]
    for r in failed:
        print(f"error: {r['out']}: {r['error']}", file=sys.stderr)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lambda-sim",
        description="Pulse-pair propagation in a three-level Lambda medium.",
        epilog="Any configuration key may be given as --key=value (flags override the config file).",
    )
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", help="flat key=value configuration file")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    overrides = {}
    for item in extra:
        m = _FLAG.match(item)
        if not m:
            print(f"error: unrecognised argument {item!r} (expected --key=value)", file=sys.stderr)
            return 2
        overrides[m.group(1)] = m.group(2)
    overrides["mode"] = args.mode
    if args.out is not None:
        overrides["out"] = args.out
    try:
        config = parse_config(args.config, overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
