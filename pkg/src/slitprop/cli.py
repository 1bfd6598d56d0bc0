"""Command-line front end: ``slitprop run``, ``slitprop compare`` and ``slitprop presets``.

Exit status: 0 success, 1 other library failure, 2 invalid configuration,
3 quadrature failed to converge (outputs are still written and flagged as
partial), 4 input/output error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import compare_fringes, find_minima
from .aperture import _shadow_center, evaluate_pattern
from .approx import TruncationScenario, fringe_shift_prediction, regime_report
from .config import METHODS, ScenarioConfig, list_presets, load_config, load_preset, preset_text
from .errors import ConfigError, ConvergenceError, InsufficientFringesError, SlitpropError
from .gravity import evaluate_gravity_pattern, neon_scenario_diagnostics, tau_sc_gravity
from .point_source import diagnostics

__all__ = ["main", "compute", "run_record", "write_pattern_csv"]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_IO = 0, 1, 2, 3, 4
CSV_COLUMNS = ("y", "z", "re_amplitude", "im_amplitude", "intensity", "probability_density")


class _PartialResults(Exception):
    pass


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _jsonable(obj):
    if is_dataclass(obj):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def compute(cfg: ScenarioConfig, t: float, method=None, threads=None):
    """Pattern for one time; never raises on quadrature failure (see ``unconverged_points``)."""
    method = method or cfg.method
    if cfg.is_gravity:
        return evaluate_gravity_pattern(cfg.gravity_scenario(t), cfg.gravity["z_screen"],
                                        cfg.grid, method, cfg.spec, threads, strict=False)
    return evaluate_pattern(cfg.slit_scenario(t), cfg.grid, method, cfg.spec, threads,
                            strict=False)


def _reference_geometry(scn):
    cy, cz = scn.aperture.center
    return scn.geometry(np.array([0.0, cy, cz]), np.array([scn.x_screen, cy, cz]))


def run_record(cfg: ScenarioConfig, t: float, result) -> dict:
    """JSON-ready diagnostics for one computed pattern.

    Every number is the unrounded value returned by the corresponding
    library call.  For slit runs ``diagnostics`` is evaluated on the path
    through the aperture centre straight to the screen.
    """
    meta = result.metadata
    rec = {
        "schema_version": 1,
        "name": cfg.name,
        "method": meta["method"],
        "t": t,
        "bc": meta["bc"],
        "lambda1": cfg.bc.lambda1,
        "lambda2": cfg.bc.lambda2,
        "status": "partial" if meta["unconverged_points"] else "ok",
        "unconverged_points": meta["unconverged_points"],
        "max_quadrature_error": meta["max_quadrature_error"],
        "omega": result.omega,
        "captured_fraction": result.captured_fraction,
        "overlapping_aperture": meta["overlapping_aperture"],
        "grid": {"n_y": cfg.grid.y_values.size, "n_z": cfg.grid.z_values.size},
    }
    if cfg.is_gravity:
        scn = cfg.gravity_scenario(t)
        gr = cfg.gravity
        root = tau_sc_gravity(np.array([0.0, 0.0, gr["z_screen"]]), np.array([0.0, 0.0, gr["z1"]]),
                              t, gr["g"])
        rec["diagnostics"] = {"tau_sc": root.tau, "roots": root.roots}
        if gr["g"] > 0:
            drop = neon_scenario_diagnostics(l1=gr["z1"], l2=gr["z_screen"] - gr["z1"], g=gr["g"],
                                             mass=scn.particle.mass, hbar=scn.particle.hbar)
            rec["drop_from_rest"] = drop
            rec["summary"] = {"mu": drop.mu, "wavelength": drop.wavelength, "t_c": drop.t1}
        return _jsonable(rec)
    scn = cfg.slit_scenario(t)
    rec["diagnostics"] = diagnostics(_reference_geometry(scn))
    try:
        tscn = TruncationScenario.from_slit(scn)
    except SlitpropError:
        tscn = None
    if tscn is not None:
        zc = _shadow_center(scn)[1]
        half = float(np.max(np.abs(cfg.grid.z_values - zc)))
        rep = regime_report(tscn, z_window=half)
        rec["regime"] = rep
        rec["summary"] = {"mu": rep.mu, "N_F": rep.N_F_a, "q": rep.q, "t_c": rep.t_c,
                          "regime": rep.regime}
    return _jsonable(rec)


def write_pattern_csv(path: Path, result) -> None:
    """Write one row per grid point with 17 significant digits."""
    g = result.grid
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for i, y in enumerate(g.y_values):
            for j, z in enumerate(g.z_values):
                a = result.amplitudes[i, j]
                w.writerow([_fmt(y), _fmt(z), _fmt(a.real), _fmt(a.imag),
                            _fmt(result.intensities[i, j]), _fmt(result.probability_density[i, j])])


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n")


def _stem(cfg, k):
    return cfg.name if len(cfg.times) == 1 else f"{cfg.name}_t{k}"


def cmd_run(args) -> int:
    cfg = _load(args)
    if args.method:
        cfg = cfg.with_method(args.method)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    partial = False
    for k, t in enumerate(cfg.times):
        res = compute(cfg, t, threads=args.threads)
        rec = run_record(cfg, t, res)
        write_pattern_csv(out / f"{_stem(cfg, k)}.csv", res)
        _write_json(out / f"{_stem(cfg, k)}.json", rec)
        partial |= rec["status"] == "partial"
        print(f"{_stem(cfg, k)}: {cfg.grid.y_values.size * cfg.grid.z_values.size} points, "
              f"status {rec['status']}")
    if partial:
        raise _PartialResults()
    return EXIT_OK


def _profile(cfg, res):
    """Row of the grid closest to ``y = 0``: ``(z, intensity, amplitude)``."""
    i = int(np.argmin(np.abs(cfg.grid.y_values)))
    return cfg.grid.z_values, res.intensities[i], res.amplitudes[i]


def fringe_report(cfg: ScenarioConfig, t: float, results: dict, reference: str) -> dict:
    """Shift and amplitude comparison of every method against ``reference``."""
    z, iref, aref = _profile(cfg, results[reference])
    zc = 0.0
    tscn = None
    if not cfg.is_gravity:
        scn = cfg.slit_scenario(t)
        zc = _shadow_center(scn)[1]
        try:
            tscn = TruncationScenario.from_slit(scn)
        except SlitpropError:
            tscn = None
    window = (zc, float(z[-1]))
    out = {"reference": reference, "origin": zc, "window": window, "methods": {}}
    try:
        ref_set = find_minima(z, iref, window=window)
    except (InsufficientFringesError, SlitpropError) as exc:
        ref_set = None
        out["reference_error"] = str(exc)
    for m, res in results.items():
        if m == reference:
            continue
        _, im, am = _profile(cfg, res)
        entry = {"max_relative_amplitude_gap": float(np.max(np.abs(am - aref)) / np.max(np.abs(aref)))}
        if ref_set is not None:
            try:
                ms = find_minima(z, im, window=window)
                cum = compare_fringes(ms, ref_set, "cumulative", origin=zc)
                suc = compare_fringes(ms, ref_set, "successive")
                entry["minima"] = ms.minima_z
                entry["reference_minima"] = ref_set.minima_z
                entry["cumulative_shift"] = cum.delta
                entry["successive_shift"] = suc.delta
                if tscn is not None:
                    entry["predicted_shift"] = fringe_shift_prediction(
                        ref_set.minima_z[:cum.n_pairs] - zc, tscn.gamma, tscn.L)
            except (InsufficientFringesError, SlitpropError) as exc:
                entry["fringe_error"] = str(exc)
        out["methods"][m] = entry
    return _jsonable(out)


def cmd_compare(args) -> int:
    cfg = _load(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if len(set(methods)) < 2 or len(set(methods)) != len(methods):
        raise ConfigError("compare needs at least two distinct methods")
    for m in methods:
        cfg.with_method(m)
    if args.reference:
        if args.reference not in methods:
            raise ConfigError("--reference must be one of --methods")
        reference = args.reference
    else:
        reference = "truncation" if "truncation" in methods else methods[-1]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    partial = False
    for k, t in enumerate(cfg.times):
        results = {m: compute(cfg, t, m, args.threads) for m in methods}
        partial |= any(r.metadata["unconverged_points"] for r in results.values())
        g = cfg.grid
        stem = f"{_stem(cfg, k)}_compare"
        with open(out / f"{stem}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["y", "z"] + [f"{c}_{m}" for m in methods
                                     for c in ("intensity", "probability_density")])
            for i, y in enumerate(g.y_values):
                for j, z in enumerate(g.z_values):
                    row = [_fmt(y), _fmt(z)]
                    for m in methods:
                        row += [_fmt(results[m].intensities[i, j]),
                                _fmt(results[m].probability_density[i, j])]
                    w.writerow(row)
        report = {"schema_version": 1, "name": cfg.name, "t": t,
                  "runs": {m: run_record(cfg, t, r) for m, r in results.items()},
                  "comparison": fringe_report(cfg, t, results, reference)}
        _write_json(out / f"{stem}.json", report)
        print(f"{stem}: methods {', '.join(methods)}; reference {reference}")
    if partial:
        raise _PartialResults()
    return EXIT_OK


def cmd_presets(args) -> int:
    if args.show:
        sys.stdout.write(preset_text(args.show))
        return EXIT_OK
    for name, desc in list_presets().items():
        print(f"{name:32s} {desc}")
    return EXIT_OK


def _load(args) -> ScenarioConfig:
    if args.preset:
        return load_preset(args.preset)
    return load_config(args.config)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="slitprop",
                                 description="Quantum slit diffraction patterns in space and time.")
    ap.add_argument("--version", action="version", version=f"slitprop {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", help="YAML configuration file")
        src.add_argument("--preset", help="name of a shipped preset")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: SLITPROP_THREADS or 1)")

    run = sub.add_parser("run", help="compute a pattern and write CSV + JSON")
    scenario_args(run)
    run.add_argument("--method", choices=METHODS, help="override the configured method")
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="compute several methods and compare fringes")
    scenario_args(cmp_)
    cmp_.add_argument("--methods", required=True, help="comma-separated list, at least two")
    cmp_.add_argument("--reference", help="method the others are compared against")
    cmp_.set_defaults(func=cmd_compare)

    pre = sub.add_parser("presets", help="list or print shipped presets")
    g = pre.add_mutually_exclusive_group()
    g.add_argument("--list", action="store_true", help="list preset names (default)")
    g.add_argument("--show", metavar="NAME", help="print a preset's YAML")
    pre.set_defaults(func=cmd_presets)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (_PartialResults, ConvergenceError) as exc:
        print(f"quadrature did not converge{': ' + str(exc) if str(exc) else ''}; "
              "outputs flagged partial", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SlitpropError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
