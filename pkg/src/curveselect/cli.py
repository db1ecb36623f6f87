"""Command-line harness: scene generation, batch simulation, benchmarks, and
the playground server.

Exit codes are a stable contract: 0 success, 2 bad configuration, 3 infeasible
scene packing, 4 port already in use.
"""

from __future__ import annotations

import argparse
import errno
import json
import socket
import statistics
import sys
import time
from io import StringIO
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .geometry import QuadBezier, chord_deviation, chord_error_bound, discretize
from .gestures import CurveParams, build_curve
from .selection import rank_objects
from .sim import (
    BlockResult,
    Scene,
    SceneConfig,
    SceneInfeasibleError,
    default_pose_template,
    derive_scene_seeds,
    generate_scene,
    run_block,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_PORT_BUSY = 4

TRIAL_CSV_HEADER = (
    "participant,technique_medium,technique_paradigm,repeat,scene_seed,target_id,"
    "captured,target_rank,selected_id,error,d_min_target,target_occluded,kappa_used"
)


def scene_to_json(scene: Scene) -> str:
    doc = {
        "config": {
            "object_count": scene.config.object_count,
            "bounds": list(scene.config.bounds),
            "center": [float(c) for c in scene.config.center],
            "object_radius": scene.config.object_radius,
            "seed": scene.config.seed,
        },
        "objects": [
            {
                "id": o.id,
                "position": [float(c) for c in o.position],
                "radius": o.radius,
                "label": o.label,
            }
            for o in scene.objects
        ],
        "target_id": scene.target_id,
    }
    return json.dumps(doc, indent=2) + "\n"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def trials_to_csv(result: BlockResult) -> str:
    out = StringIO()
    out.write(TRIAL_CSV_HEADER + "\n")
    for row in result.rows:
        r = row.record
        cells = [
            row.participant,
            r.technique.medium.value,
            r.technique.paradigm.value,
            row.repeat,
            r.scene_seed,
            r.target_id,
            r.captured,
            r.target_rank,
            r.selected_id,
            r.error,
            r.d_min_target,
            r.target_occluded,
            r.kappa_used,
        ]
        out.write(",".join(_cell(c) for c in cells) + "\n")
    return out.getvalue()


def summary_to_json(result: BlockResult) -> str:
    return json.dumps(result.summary, indent=2, sort_keys=True) + "\n"


def _print_summary(result: BlockResult):
    print(f"trials: {result.summary['trials']}")
    header = f"{'technique':<26}{'capture':>9}{'error':>9}{'rank':>7}{'occl.cap':>10}{'d_min':>10}"
    print(header)
    for label, m in result.summary["techniques"].items():
        def fmt(v, spec=".3f"):
            return "-" if v is None else format(v, spec)

        print(
            f"{label:<26}{fmt(m['capture_rate']):>9}{fmt(m['error_rate']):>9}"
            f"{fmt(m['mean_target_rank'], '.2f'):>7}{fmt(m['occluded_capture_rate']):>10}"
            f"{fmt(m['mean_d_min'], '.4f'):>10}"
        )


def cmd_gen_scene(config: RunConfig, out_path: Optional[str]) -> int:
    scene = generate_scene(config.scene_config())
    path = Path(out_path or config.scene_json)
    path.write_text(scene_to_json(scene))
    print(f"wrote {len(scene.objects)} objects (target {scene.target_id}) to {path}")
    return EXIT_OK


def _run_configured_block(config: RunConfig) -> BlockResult:
    seeds = derive_scene_seeds(config.seed, config.participants * config.repeats)
    return run_block(
        seeds,
        config.techniques,
        config.repeats,
        config.participants,
        config.noise_model(),
        scene_config=config.scene_config(),
        pose_template=default_pose_template(config.wrist),
        forearm=config.forearm_frame(),
        eye=config.eye,
        length=config.length,
        gain=config.gain,
        segments=config.segments,
        slots=config.slots,
    )


def cmd_simulate(config: RunConfig, out_csv: Optional[str]) -> int:
    result = _run_configured_block(config)
    csv_path = Path(out_csv or config.trials_csv)
    csv_path.write_text(trials_to_csv(result))
    summary_path = Path(config.summary_json)
    summary_path.write_text(summary_to_json(result))
    _print_summary(result)
    print(f"wrote {len(result.rows)} trials to {csv_path}, summary to {summary_path}")
    return EXIT_OK


def _bench_scene(config: RunConfig, count: int) -> Scene:
    bounds = config.bounds
    if count > config.object_count:
        # Scale the box so larger clouds still pack without overlap.
        factor = 1.5 * (count / config.object_count) ** (1.0 / 3.0)
        bounds = tuple(b * factor for b in bounds)
    return generate_scene(
        SceneConfig(
            object_count=count,
            bounds=bounds,
            center=config.center,
            object_radius=config.object_radius,
            seed=config.seed,
        )
    )


def _bench_curve(config: RunConfig, kappa: float = 0.75) -> QuadBezier:
    pose = default_pose_template(config.wrist)
    return build_curve(pose, CurveParams(kappa=kappa, length=config.length, gain=config.gain))


def latency_report(config: RunConfig) -> dict:
    """Median/p99 ranking latency per object count. Wall-clock timings; the
    only nondeterministic part of the bench output."""
    line = discretize(_bench_curve(config), config.segments)
    report = {}
    for count in config.bench_object_counts:
        objects = _bench_scene(config, count).objects
        rank_objects(line, objects, config.slots)  # warm-up
        samples = []
        for _ in range(config.bench_iterations):
            start = time.perf_counter()
            rank_objects(line, objects, config.slots)
            samples.append((time.perf_counter() - start) * 1e3)
        samples.sort()
        report[str(count)] = {
            "median_ms": statistics.median(samples),
            "p99_ms": samples[min(len(samples) - 1, int(0.99 * len(samples)))],
            "iterations": config.bench_iterations,
        }
    return report


def deviation_report(config: RunConfig) -> dict:
    """Measured curve-to-polyline deviation against the analytic bound for a
    range of segment counts; deterministic given the config seed."""
    rng = np.random.default_rng(config.seed)
    pose = default_pose_template(config.wrist)
    curves = []
    for _ in range(config.bench_curves):
        kappa = float(rng.uniform(0.05, config.gain))
        length = float(rng.uniform(0.5, 1.5)) * config.length
        curves.append(build_curve(pose, CurveParams(kappa=kappa, length=length, gain=config.gain)))

    per_n = {}
    for n in config.bench_segment_counts:
        worst_dev = 0.0
        worst_ratio = 0.0
        for curve in curves:
            dev = chord_deviation(curve, n, config.bench_dense_samples)
            bound = chord_error_bound(curve, n)
            worst_dev = max(worst_dev, dev)
            worst_ratio = max(worst_ratio, dev / bound if bound > 0 else 0.0)
        per_n[str(n)] = {"max_deviation": worst_dev, "max_deviation_over_bound": worst_ratio}

    ns = list(config.bench_segment_counts)
    convergence = {}
    for a, b in zip(ns, ns[1:]):
        if b == 2 * a:
            convergence[f"{a}->{b}"] = (
                per_n[str(a)]["max_deviation"] / per_n[str(b)]["max_deviation"]
            )
    return {"per_segment_count": per_n, "halving_ratios": convergence}


def cmd_bench(config: RunConfig) -> int:
    latency = latency_report(config)
    deviation = deviation_report(config)
    print("ranking latency (wall clock, nondeterministic):")
    for count, stats in latency.items():
        print(
            f"  {count:>6} objects: median {stats['median_ms']:.4f} ms, "
            f"p99 {stats['p99_ms']:.4f} ms over {stats['iterations']} runs"
        )
    print("chord deviation vs analytic bound:")
    for n, stats in deviation["per_segment_count"].items():
        print(
            f"  n={n:>3}: max deviation {stats['max_deviation']:.3e} "
            f"({stats['max_deviation_over_bound']:.3f} of bound)"
        )
    for pair, ratio in deviation["halving_ratios"].items():
        print(f"  deviation ratio {pair}: {ratio:.3f} (quadratic convergence -> ~4)")
    if config.bench_json:
        doc = {"latency": latency, "deviation": deviation}
        Path(config.bench_json).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        print(f"wrote bench report to {config.bench_json}")
    return EXIT_OK


def cmd_serve(config: RunConfig, port: Optional[int]) -> int:
    import uvicorn

    from .service import create_app

    bind_port = port if port is not None else config.port
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind(("127.0.0.1", bind_port))
    except OSError as exc:
        if exc.errno == errno.EADDRINUSE:
            print(f"port {bind_port} is already in use", file=sys.stderr)
            return EXIT_PORT_BUSY
        raise
    finally:
        probe.close()

    app = create_app(config)
    print(f"playground listening on http://127.0.0.1:{bind_port} (ws endpoint /ws)", flush=True)
    uvicorn.run(app, host="127.0.0.1", port=bind_port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curveselect",
        description="Curved-ray selection engine: scenes, simulations, benchmarks, playground.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser):
        p.add_argument("--config", help="JSON run configuration", default=None)
        p.add_argument("--seed", type=int, help="override the config seed", default=None)

    p_gen = sub.add_parser("gen-scene", help="write a seeded scene as JSON")
    add_common(p_gen)
    p_gen.add_argument("--out", help="output path (default from config)", default=None)

    p_sim = sub.add_parser("simulate", help="run the trial block and write CSV + summary")
    add_common(p_sim)
    p_sim.add_argument("--out", help="trial CSV path (default from config)", default=None)

    p_bench = sub.add_parser("bench", help="latency and discretization-error report")
    add_common(p_bench)

    p_serve = sub.add_parser("serve", help="serve the interactive playground")
    add_common(p_serve)
    p_serve.add_argument("--port", type=int, help="TCP port (default from config)", default=None)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, seed_override=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "gen-scene":
            return cmd_gen_scene(config, args.out)
        if args.command == "simulate":
            return cmd_simulate(config, args.out)
        if args.command == "bench":
            return cmd_bench(config)
        if args.command == "serve":
            return cmd_serve(config, args.port)
    except SceneInfeasibleError as exc:
        print(f"infeasible scene: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
