"""Command-line runner and the scaling benchmark harness.

``kiloswarm run`` executes a config headless (or serves the live viewer
with ``--serve``) and prints a final JSON summary line.  ``kiloswarm
bench`` times headless runs across swarm sizes and neighbor strategies
and emits one machine-readable row per run.  Exit codes: 0 success,
1 configuration error, 2 runtime error.

Set KILOSWARM_LOG (DEBUG/INFO/WARNING/...) for diagnostic verbosity.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys
from time import perf_counter

from .config import ConfigError, SimConfig, load_config
from .snapshots import SnapshotWriter
from .world import World, run

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

BENCH_WORKLOADS = ("edge_follow", "follow_the_leader")
# chain geometry for the follow-the-leader workload
_CHAIN_SPACING_MM = 60.0
_CHAIN_COLS = 50


def _setup_logging() -> None:
    level = os.environ.get("KILOSWARM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kiloswarm",
                                     description="Kilobot-style swarm simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a simulation from a config file")
    p_run.add_argument("--config", required=True, help="path to a JSON config")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--duration", type=float, default=None, help="override duration_s")
    p_run.add_argument("--export", default=None, help="write snapshots (JSON lines) here")
    p_run.add_argument("--serve", type=int, default=None, metavar="PORT",
                       help="serve the live viewer on this port")
    p_run.add_argument("--headless", action="store_true",
                       help="run without the viewer (default unless --serve)")
    p_run.add_argument("--speed-factor", type=float, default=None,
                       help="wall-clock pacing: simulated seconds per wall second")

    p_bench = sub.add_parser("bench", help="benchmark ticks/s across swarm sizes")
    p_bench.add_argument("--bots", default="250,500,1000,2000",
                         help="comma-separated swarm sizes")
    p_bench.add_argument("--duration", type=float, default=60.0,
                         help="simulated seconds per run")
    p_bench.add_argument("--strategy", default="auto", choices=("auto", "grid", "brute"))
    p_bench.add_argument("--workload", default="follow_the_leader", choices=BENCH_WORKLOADS)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_bench(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # runtime failure: report, do not traceback-spam
        log.debug("runtime error", exc_info=True)
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def _apply_overrides(cfg: SimConfig, args) -> SimConfig:
    changes = {}
    if args.seed is not None:
        changes["rand_seed"] = args.seed
    if args.duration is not None:
        changes["duration_s"] = args.duration
    if not changes:
        return cfg
    return dataclasses.replace(cfg, **changes)


def _cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)

    if args.serve is not None:
        from .bridge import serve_blocking

        summary = serve_blocking(cfg, port=args.serve, export_path=args.export,
                                 speed_factor=args.speed_factor)
        print(json.dumps(summary))
        return EXIT_OK

    world = World(cfg)
    pace = args.speed_factor is not None
    if pace:
        world.speed_factor = args.speed_factor
    writer = SnapshotWriter(args.export) if args.export else None
    try:
        result = run(world, cfg.duration_s, cfg.snapshot_every_n_ticks,
                     sink=writer.write if writer else None, pace=pace)
    finally:
        if writer:
            writer.close()
    print(json.dumps(result.summary()))
    return EXIT_OK


def bench_config(workload: str, n_bots: int, strategy: str, seed: int = 7) -> SimConfig:
    """Config for one benchmark run of the given workload and size."""
    if workload == "follow_the_leader":
        # a serpentine chain: predecessors stay adjacent, density stays sane
        poses = []
        for i in range(n_bots):
            row, col = divmod(i, _CHAIN_COLS)
            if row % 2:
                col = _CHAIN_COLS - 1 - col
            poses.append([col * _CHAIN_SPACING_MM, row * _CHAIN_SPACING_MM])
        layout = {"type": "explicit", "poses": poses}
        controller = "follow_the_leader"
    elif workload == "edge_follow":
        layout = "grid"
        controller = "edge_follow"
    else:
        raise ConfigError(f"--workload: expected one of {BENCH_WORKLOADS}, got {workload!r}")
    return SimConfig(
        n_bots=n_bots,
        controller=controller,
        neighbor_strategy=strategy,
        initial_layout=layout,
        msg_success_prob=0.9,
        distance_noise_std_mm=2.0,
        rand_seed=seed,
        snapshot_every_n_ticks=0,
    )


def run_bench(sizes, duration_s: float, strategy: str, workload: str) -> list[dict]:
    """Headless timing runs; wall time excludes world construction."""
    rows = []
    for n in sizes:
        cfg = bench_config(workload, n, strategy)
        build_start = perf_counter()
        world = World(cfg)
        build_s = perf_counter() - build_start
        result = run(world, duration_s)
        rows.append({
            "bots": n,
            "workload": workload,
            "strategy": world.strategy,
            "simulated_s": duration_s,
            "ticks": result.ticks,
            "wall_s": result.wall_seconds,
            "ticks_per_s": result.ticks / result.wall_seconds if result.wall_seconds else math.inf,
            "realtime_factor": result.realtime_factor,
            "build_s": build_s,
        })
    return rows


def _cmd_bench(args) -> int:
    try:
        sizes = [int(tok) for tok in args.bots.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"--bots: expected comma-separated integers, got {args.bots!r}")
    if not sizes or any(n < 1 for n in sizes):
        raise ConfigError(f"--bots: sizes must be positive, got {args.bots!r}")
    for row in run_bench(sizes, args.duration, args.strategy, args.workload):
        print(json.dumps(row))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
