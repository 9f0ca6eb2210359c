"""Command-line front end.

Subcommands: verify | curvature | geodesic | signature. Each reads a JSON
instance config, runs its checks and writes ``report.json`` (plus
``trajectory.csv`` for geodesic runs) into the output directory.

Exit codes: 0 all enabled checks passed, 1 verification failure,
2 config error, 3 runtime/domain error.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import geodesic as ge
from . import hspace2211 as hs
from . import tensorcalc as tc
from . import verify as vf
from .errors import ConfigError, RigidHError, StepSizeUnderflow

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


# ---------------------------------------------------------------------------
# config parsing


def _require(cfg, key, typ, where, type_name):
    if key not in cfg:
        raise ConfigError(f"{where}.{key}: required")
    val = cfg[key]
    if not isinstance(val, typ) or isinstance(val, bool):
        raise ConfigError(f"{where}.{key}: expected {type_name}, got {val!r}")
    return val


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return cfg


def parse_instance(cfg: dict):
    """(HSpaceParams, sampling dict) from a parsed config."""
    if "params" not in cfg:
        raise ConfigError("params: required")
    params = hs.HSpaceParams.from_spec(cfg["params"], where="params")
    if "sampling" not in cfg:
        raise ConfigError("sampling: required")
    samp = cfg["sampling"]
    ranges = _require(samp, "ranges", list, "sampling", "a list")
    if len(ranges) != hs.DIM or any(
            not (isinstance(r, list) and len(r) == 2) for r in ranges):
        raise ConfigError("sampling.ranges: expected six [lo, hi] pairs")
    count = _require(samp, "count", int, "sampling", "an integer")
    seed = _require(samp, "seed", int, "sampling", "an integer")
    if count <= 0:
        raise ConfigError("sampling.count: must be positive")
    return params, {"ranges": ranges, "count": count, "seed": seed}


def parse_geodesic_block(cfg: dict):
    if "geodesic" not in cfg:
        raise ConfigError("geodesic: required for the geodesic command")
    blk = cfg["geodesic"]
    x0 = _require(blk, "x0", list, "geodesic", "a list")
    v0 = _require(blk, "v0", list, "geodesic", "a list")
    if len(x0) != hs.DIM or len(v0) != hs.DIM:
        raise ConfigError("geodesic.x0/v0: expected six coordinates")
    t_end = _require(blk, "t_end", (int, float), "geodesic", "a number")
    rel_tol = blk.get("rel_tol", 1e-10)
    max_step = blk.get("max_step")
    drift_tol = blk.get("drift_tol", 1e-6)
    return (np.asarray(x0, dtype=float), np.asarray(v0, dtype=float),
            float(t_end), float(rel_tol),
            None if max_step is None else float(max_step), float(drift_tol))


# ---------------------------------------------------------------------------
# point-level checks (top level so a process pool can pickle them)


def _point_residuals(args):
    params, pt, mode, perturbation = args
    try:
        _, e_abs, e_rel = vf.eisenhart_residual(
            params, pt, mode=mode, h_perturbation=perturbation)
        _, k_abs, k_rel = vf.killing_tensor_residual(params, pt, mode=mode)
    except RigidHError as exc:
        return ("skip", str(exc))
    return ("ok", e_abs, e_rel, k_abs, k_rel)


def _map_points(fn, jobs, work):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, work))
    return [fn(w) for w in work]


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(cfg, tol, jobs):
    params, samp = parse_instance(cfg)
    pts, rejected = vf.sample_points(params, samp["ranges"], samp["count"],
                                     samp["seed"])
    perturbation = None
    pert_cfg = cfg.get("perturb_h")
    if pert_cfg is not None:
        perturbation = (int(pert_cfg.get("i", 1)), int(pert_cfg.get("j", 1)),
                        float(pert_cfg.get("factor", 1.01)))

    eis = vf.VerificationReport(check="eisenhart", tolerance=tol, sample=pts)
    kil = vf.VerificationReport(check="killing_tensor", tolerance=tol,
                                sample=pts)
    eis.n_skipped = kil.n_skipped = rejected
    work = [(params, pt, "analytic", perturbation) for pt in pts]
    for out in _map_points(_point_residuals, jobs, work):
        if out[0] == "skip":
            eis.n_skipped += 1
            kil.n_skipped += 1
            continue
        _, e_abs, e_rel, k_abs, k_rel = out
        eis.record(e_abs, e_rel)
        kil.record(k_abs, k_rel)

    lin_cfg = cfg.get("linearity", {})
    a1 = float(lin_cfg.get("a1", 2.5))
    a2 = float(lin_cfg.get("a2", -3.7))
    lin = vf.linearity_check(params, a1, a2, pts, tol=tol)

    checks = [eis.to_dict(), kil.to_dict(), lin.to_dict()]
    passed = eis.passed and kil.passed and lin.passed
    return checks, passed, {}


def cmd_curvature(cfg, tol, jobs):
    params, samp = parse_instance(cfg)
    pts, rejected = vf.sample_points(params, samp["ranges"], samp["count"],
                                     samp["seed"])
    direct, criterion_holds, details = vf.constant_curvature_check(
        params, pts, tol=tol)
    agreement = direct.is_constant == criterion_holds
    check = {
        "check": "constant_curvature",
        "tolerance": tol,
        "sample": [list(map(float, p)) for p in pts],
        "n_points": len(pts),
        "n_skipped": rejected,
        "direct": direct.to_dict(),
        "criterion": details,
        "agreement": agreement,
        "verdict": "pass" if agreement else "fail",
    }
    return [check], agreement, {}


def cmd_geodesic(cfg, tol, jobs, out_dir):
    params, _ = parse_instance(cfg)
    x0, v0, t_end, rel_tol, max_step, drift_tol = parse_geodesic_block(cfg)
    m = hs.HSpaceMetric(params)

    conserved = [("Q_g", lambda x: hs.metric_at(params, x)),
                 ("Q_h", lambda x: hs.killing_form_at(params, x))]
    initial = ge.GeodesicState(x0, v0)
    try:
        traj, trace = ge.integrate(m, initial, t_end, rel_tol=rel_tol,
                                   conserved=conserved, max_step=max_step)
    except StepSizeUnderflow as exc:
        check = {
            "check": "geodesic_conservation",
            "verdict": "halted",
            "halt_reason": str(exc),
            "halt_t": exc.t,
            "last_state": {"x": list(map(float, exc.state.x)),
                           "v": list(map(float, exc.state.v))},
        }
        raise _GeodesicHalt(check) from exc

    drifts = {name: trace.drift(name) for name in trace.values}
    passed = all(d <= drift_tol for d in drifts.values())
    check = {
        "check": "geodesic_conservation",
        "t_end": t_end,
        "rel_tol": rel_tol,
        "drift_tolerance": drift_tol,
        "accepted_steps": len(traj.t) - 1,
        "drifts": drifts,
        "initial_values": {name: trace.initial(name) for name in trace.values},
        "verdict": "pass" if passed else "fail",
    }
    csv_path = out_dir / "trajectory.csv"
    ge.write_trajectory_csv(csv_path, traj, trace)
    return [check], passed, {"trajectory_csv": str(csv_path)}


class _GeodesicHalt(Exception):
    def __init__(self, check):
        super().__init__("geodesic halted at a domain boundary")
        self.check = check


def cmd_signature(cfg, tol, jobs):
    params, samp = parse_instance(cfg)
    pts, rejected = vf.sample_points(params, samp["ranges"], samp["count"],
                                     samp["seed"])
    base = params.spec()
    results = []
    for signs in itertools.product((1, -1), repeat=4):
        spec = dict(base)
        spec["e2"], spec["e4"], spec["e5"], spec["e6"] = signs
        trial = hs.HSpaceParams.from_spec(spec)
        m = hs.HSpaceMetric(trial)
        sigs = set()
        skipped = 0
        for pt in pts:
            try:
                sigs.add(tc.signature_at(m, pt))
            except RigidHError:
                skipped += 1
        entry = {
            "e2": signs[0], "e4": signs[1], "e5": signs[2], "e6": signs[3],
            "signatures": sorted(map(list, sigs)),
            "constant": len(sigs) == 1,
            "skipped": skipped,
        }
        entry["is_2_4"] = entry["constant"] and sorted(sigs)[0] == (2, 4)
        results.append(entry)
    found = [r for r in results if r["is_2_4"]]
    check = {
        "check": "signature_probe",
        "n_points": len(pts),
        "n_skipped": rejected,
        "assignments": results,
        "n_signature_2_4": len(found),
        "verdict": "pass",
    }
    return [check], True, {}


# ---------------------------------------------------------------------------
# entry point


def _json_default(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {obj!r}")


def write_report(out_dir, report):
    path = out_dir / "report.json"
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


def _summary(checks):
    lines = []
    for c in checks:
        name = c["check"]
        verdict = c.get("verdict", "?")
        rel = c.get("max_rel_residual")
        detail = f"  max_rel={rel:.3e}" if rel is not None else ""
        lines.append(f"{name:<28} {verdict}{detail}")
    return "\n".join(lines)


def build_parser():
    p = argparse.ArgumentParser(
        prog="rigidh",
        description="Verification toolkit for six-dimensional [2211] "
                    "rigid h-space metrics.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("verify", "curvature", "geodesic", "signature"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON instance config")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the sampling seed")
        sp.add_argument("--tol", type=float, default=None,
                        help="override the residual tolerance")
        sp.add_argument("--jobs", type=int, default=1,
                        help="worker processes for point-level checks")
    return p


def main(argv=None) -> int:
    from pathlib import Path

    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.setdefault("sampling", {})["seed"] = args.seed
        tol = args.tol
        if tol is None:
            tol = float(cfg.get("tolerances", {}).get("residual", vf.DEFAULT_TOL))
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)

        extras = {}
        if args.command == "verify":
            checks, passed, extras = cmd_verify(cfg, tol, args.jobs)
        elif args.command == "curvature":
            checks, passed, extras = cmd_curvature(cfg, tol, args.jobs)
        elif args.command == "geodesic":
            checks, passed, extras = cmd_geodesic(cfg, tol, args.jobs, out_dir)
        else:
            checks, passed, extras = cmd_signature(cfg, tol, args.jobs)
        status = EXIT_PASS if passed else EXIT_FAIL
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _GeodesicHalt as exc:
        out_dir = Path(args.out)
        report = {
            "command": args.command,
            "config": cfg,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
            "checks": [exc.check],
            "exit_status": EXIT_RUNTIME,
        }
        write_report(out_dir, report)
        print(_summary([exc.check]))
        print(f"halted: {exc.check['halt_reason']}", file=sys.stderr)
        return EXIT_RUNTIME
    except (RigidHError, RuntimeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    report = {
        "command": args.command,
        "config": cfg,
        "tolerance": tol,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
        "checks": checks,
        "exit_status": status,
        **extras,
    }
    write_report(out_dir, report)
    print(_summary(checks))
    return status


if __name__ == "__main__":
    sys.exit(main())
