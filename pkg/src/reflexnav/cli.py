"""Command-line entry point: run scenarios, check guarantees, emit tables,
and batch-compare the reflex law against the velocity-obstacle baseline.

Exit codes: 0 success / goal reached, 2 scenario parse error, 3 ill-posed
scene, 4 collision, 5 timeout.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import hats, navlaw, scenarios, world as world_mod
from .render import render_trace_svg
from .sim import SimConfig, Status, Trace, run

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_ILLPOSED = 3
EXIT_COLLISION = 4
EXIT_TIMEOUT = 5

_STATUS_EXIT = {
    Status.REACHED: EXIT_OK,
    Status.ABORTED_ILLPOSED: EXIT_ILLPOSED,
    Status.COLLISION: EXIT_COLLISION,
    Status.TIMEOUT: EXIT_TIMEOUT,
}


def _load(path: str) -> scenarios.ScenarioSpec:
    try:
        return scenarios.load_scenario(path)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise ValueError(f"failed to parse scenario {path!r}: {exc}") from exc


def _apply_overrides(spec: scenarios.ScenarioSpec, args) -> None:
    if getattr(args, "dt", None) is not None:
        spec.sim["dt"] = args.dt
    if getattr(args, "rays", None) is not None:
        spec.sim["rays"] = args.rays
    if getattr(args, "edge_threshold", None) is not None:
        spec.sim["edge_threshold"] = args.edge_threshold
    if getattr(args, "goal_distance", None) is not None:
        spec.goal_distance = args.goal_distance
    if getattr(args, "dstar", None) is not None:
        spec.sim["d_star"] = args.dstar
    if getattr(args, "seed", None) is not None:
        spec.sim["seed"] = args.seed
    if getattr(args, "controller", None) is not None:
        spec.sim["controller"] = args.controller


def cmd_run(args) -> int:
    try:
        spec = _load(args.scenario)
        _apply_overrides(spec, args)
        wrld, state, config = scenarios.build(spec)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    trace = run(wrld, state, config)

    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.trace.csv").write_text(trace.to_csv())
    Path(f"{prefix}.summary").write_text("\n".join(trace.summary_lines()) + "\n")
    snap = [float(s) for s in args.snapshot_times.split(",")] \
        if args.snapshot_times else None
    # Render against a fresh world: triggered motions were consumed by the run.
    wrld2, state2, _ = scenarios.build(spec)
    svg = render_trace_svg(wrld2, trace, state2.position, state2.f,
                           config.goal_distance, snapshot_times=snap,
                           show_hats=args.hats)
    Path(f"{prefix}.svg").write_text(svg)

    for line in trace.summary_lines():
        print(line)
    return _STATUS_EXIT[trace.status]


def _check_report(spec: scenarios.ScenarioSpec) -> list[dict]:
    wrld, state, config = scenarios.build(spec)
    v = state.v_max
    rows: list[dict] = []

    worst_margin = math.inf
    for i, obs in enumerate(wrld.obstacles):
        rep = world_mod.check_lemma1(obs, 0.0, v, samples=512)
        worst_margin = min(worst_margin, rep.margin)
    rows.append({"check": "lemma1", "passed": worst_margin > 0.0,
                 "margin": worst_margin,
                 "detail": "outward boundary speed below robot speed"})

    horizon = min(config.horizon, 30.0)
    try:
        observed = world_mod.check_theorem1_speed(
            wrld.classes, wrld.obstacles, horizon, v, time_step=0.5,
            samples=128, two_sided=True)
        margin = min(c.speed_bound - observed[c.id] for c in wrld.classes)
        rows.append({"check": "theorem1_speed", "passed": True,
                     "margin": margin, "detail": f"observed={observed}"})
    except world_mod.BoundViolated as exc:
        rows.append({"check": "theorem1_speed", "passed": False,
                     "margin": -math.inf, "detail": str(exc)})

    safety = navlaw.check_safety_tuning(wrld.classes, v)
    margin = min(m for _, m in safety.values())
    rows.append({"check": "safety_tuning",
                 "passed": all(ok for ok, _ in safety.values()),
                 "margin": margin, "detail": str(safety)})

    meta = spec.metadata.get("theorem2", {})
    delta_star = {int(k): float(val)
                  for k, val in meta.get("delta_star", {}).items()}
    if delta_star:
        rep2 = hats.check_theorem2(wrld.obstacles, wrld.classes, delta_star,
                                   state.f, state.position,
                                   horizon=min(config.horizon, 40.0),
                                   time_step=max(config.dt, 0.2))
        rows.append({"check": "theorem2", "passed": rep2.passed,
                     "margin": rep2.min_margin,
                     "detail": str(rep2.first_violation)})
        heights = [(int(k), float(val))
                   for k, val in meta.get("hat_height", {}).items()]
        drift = navlaw.check_drift_tuning(wrld.classes, heights, delta_star, v)
        rows.append({"check": "drift_tuning",
                     "passed": all(ok for ok, _ in drift.values()),
                     "margin": math.nan, "detail": str(drift)})
    return rows


def cmd_check(args) -> int:
    try:
        spec = _load(args.scenario)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    rows = _check_report(spec)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["check", "passed", "margin", "detail"])
    for r in rows:
        writer.writerow([r["check"], r["passed"], f"{r['margin']:.6g}",
                         r["detail"]])
        flag = "PASS" if r["passed"] else "FAIL"
        print(f"{flag:4s} {r['check']:16s} margin={r['margin']:.6g}  "
              f"{r['detail']}")
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    return EXIT_OK


def criteria_table(xi_values) -> str:
    """CSV of the spacing criteria over a grid of speed ratios."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["xi", "omega", "upsilon", "gamma", "xi_fn",
                     "grid_threshold"])
    for xi in xi_values:
        delta = math.asin(xi)
        writer.writerow([f"{xi:.10g}",
                         f"{hats.criterion_omega(xi):.10g}",
                         f"{hats.criterion_upsilon(xi):.10g}",
                         f"{hats.criterion_gamma(xi):.10g}",
                         f"{hats.criterion_xi_fn(xi):.10g}",
                         f"{hats.rotating_grid_threshold(delta):.10g}"])
    return buf.getvalue()


def cmd_tables(args) -> int:
    if args.xi:
        xi_values = [float(x) for x in args.xi.split(",") if x != ""]
    else:
        xi_values = [0.0, 1 / 8, 1 / 7, 1 / 6, 1 / 4, 1 / 3, 1 / 2,
                     1 / math.sqrt(2.0)]
    text = criteria_table(xi_values)
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    return EXIT_OK


def _compare_one(payload) -> tuple[int, str, str, float | None]:
    spec_dict, seed, controller = payload
    spec = scenarios.ScenarioSpec.from_dict(spec_dict)
    spec.sim["seed"] = seed
    spec.sim["controller"] = controller
    wrld, state, config = scenarios.build(spec)
    trace = run(wrld, state, config)
    t = trace.reached_time if trace.status == Status.REACHED else None
    return seed, controller, trace.status.value, t


def cmd_compare(args) -> int:
    try:
        spec = _load(args.scenario)
        _apply_overrides(spec, args)
        spec.sim.setdefault("noise_std", 0.1)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    jobs = [(spec.to_dict(), seed, ctrl)
            for seed in range(args.seeds) for ctrl in ("pcl", "vom")]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_compare_one, jobs))
    else:
        results = [_compare_one(j) for j in jobs]
    by_key = {(seed, ctrl): (status, t) for seed, ctrl, status, t in results}

    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["seed", "pcl_status", "pcl_time", "vom_status",
                     "vom_time"])
    times = {"pcl": [], "vom": []}
    censored = {"pcl": 0, "vom": 0}
    for seed in range(args.seeds):
        row = [seed]
        for ctrl in ("pcl", "vom"):
            status, t = by_key[(seed, ctrl)]
            row.extend([status, "" if t is None else f"{t:.10g}"])
            if t is None:
                censored[ctrl] += 1
            else:
                times[ctrl].append(t)
        writer.writerow(row)
    Path(f"{prefix}.times.csv").write_text(buf.getvalue())

    edges = np.linspace(0.0, spec.sim.get("horizon", 120.0), 25)
    hist = io.StringIO()
    writer = csv.writer(hist)
    writer.writerow(["bin_lo", "bin_hi", "pcl", "vom"])
    hp, _ = np.histogram(times["pcl"], bins=edges)
    hv, _ = np.histogram(times["vom"], bins=edges)
    for lo, hi, a, b in zip(edges[:-1], edges[1:], hp, hv):
        writer.writerow([f"{lo:.6g}", f"{hi:.6g}", int(a), int(b)])
    Path(f"{prefix}.hist.csv").write_text(hist.getvalue())

    for ctrl in ("pcl", "vom"):
        done = times[ctrl]
        mean = statistics.fmean(done) if done else math.nan
        med = statistics.median(done) if done else math.nan
        print(f"{ctrl}: completed={len(done)}/{args.seeds} "
              f"censored={censored[ctrl]} mean={mean:.3f} median={med:.3f}")
    if times["pcl"] and times["vom"] and \
            statistics.fmean(times["pcl"]) > statistics.fmean(times["vom"]):
        print("warning: reflex law slower on average than the baseline here "
              "(soft expectation only; baseline tuning is configuration)")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="reflexnav",
        description="Reactive navigation among moving obstacles: simulate, "
                    "check guarantees, tabulate criteria, compare controllers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one scenario")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--out", required=True, help="output path prefix")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--controller", choices=["pcl", "vom"], default=None)
    p_run.add_argument("--dt", type=float, default=None)
    p_run.add_argument("--rays", type=int, default=None)
    p_run.add_argument("--edge-threshold", type=float, default=None,
                       dest="edge_threshold")
    p_run.add_argument("--goal-distance", type=float, default=None,
                       dest="goal_distance")
    p_run.add_argument("--dstar", type=float, default=None)
    p_run.add_argument("--snapshot-times", default=None, dest="snapshot_times")
    p_run.add_argument("--hats", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_check = sub.add_parser("check", help="evaluate guarantee conditions")
    p_check.add_argument("--scenario", required=True)
    p_check.add_argument("--out", default=None, help="CSV report path")
    p_check.set_defaults(func=cmd_check)

    p_tab = sub.add_parser("tables", help="emit the spacing criteria tables")
    p_tab.add_argument("--xi", default=None,
                       help="comma-separated speed ratios (empty for none)")
    p_tab.add_argument("--out", default=None)
    p_tab.set_defaults(func=cmd_tables)

    p_cmp = sub.add_parser("compare", help="batch-compare pcl vs vom")
    p_cmp.add_argument("--scenario", required=True)
    p_cmp.add_argument("--out", required=True, help="output path prefix")
    p_cmp.add_argument("--seeds", type=int, default=100)
    p_cmp.add_argument("--jobs", type=int, default=1)
    p_cmp.add_argument("--dt", type=float, default=None)
    p_cmp.add_argument("--rays", type=int, default=None)
    p_cmp.set_defaults(func=cmd_compare)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
