# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

"""
Command-line front end.

    aos-sched solve --config system.json --N 6 --out policy.json
    aos-sched simulate --config system.json --policy policy.json --seed 1 2 3 --out runs.csv
    aos-sched sweep --mode n --q 0.1 --values 2 4 6 8 12 20 --out by_bandwidth.csv

Exit codes: 0 on success, 2 for configuration errors, 3 for solver or simulation failures.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from contextlib import contextmanager
from typing import IO, Iterator, List, Optional, Sequence

from .__about__ import __version__
from .config_io import (
    PolicyArtifact,
    artifact_from_fixed_eta,
    artifact_from_relaxed,
    dump_policy_artifact,
    load_policy_artifact,
    load_system_config,
)
from .errors import AosError, ConfigurationError
from .lagrange import relaxed_policy, solve_all
from .model import SystemConfig, average_weights
from .scheduler import GreedyScheduler, NearStationaryScheduler, RelaxedScheduler, Scheduler
from .simulation import DEFAULT_SEEDS, SweepRow, run, sweep_N, sweep_q

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3

FLOAT_FORMAT = ".9g"
SIMULATE_HEADER = ("scheduler", "seed", "T", "J_avg", "D_avg")
SWEEP_HEADER = ("x", "J_ours_mean", "J_ours_se", "J_greedy_mean", "J_greedy_se", "J_lower")
SCHEDULERS = ("ours", "greedy", "relaxed")
DEFAULT_SWEEP_T = 100_000
DEFAULT_SWEEP_Q = 0.1
DEFAULT_SWEEP_N = 6


def _fmt(value: float) -> str:
    return format(float(value), FLOAT_FORMAT)


@contextmanager
def _open_output(path: str) -> Iterator[IO[str]]:
    if path == "-":
        yield sys.stdout
        return
    try:
        f = open(path, "w", encoding="utf-8", newline="")
    except OSError as e:
        raise ConfigurationError(f"Cannot write {path}: {e}") from e
    with f:
        yield f


def _write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
    with _open_output(path) as f:
        writer = csv.writer(f, lineterminator="\r\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info("Wrote %d rows to %s", len(rows), path)


def cmd_solve(args: argparse.Namespace) -> int:
    """Solve the relaxed problem (or one fixed price) and write the policy artifact."""
    config = load_system_config(args.config)
    artifact: PolicyArtifact
    if args.eta is not None:
        artifact = artifact_from_fixed_eta(args.eta, solve_all(args.eta, config.nodes))
    else:
        N = config.N if args.N is None else args.N
        if not 1 <= N <= config.M:
            raise ConfigurationError(f"N must satisfy 1 <= N <= M={config.M}, got {N}")
        artifact = artifact_from_relaxed(relaxed_policy(config.nodes, N), N)
    dump_policy_artifact(artifact, args.out)
    return EXIT_OK


def _build_scheduler(args: argparse.Namespace, config: SystemConfig) -> Scheduler:
    name = "greedy" if args.greedy else args.scheduler
    if name == "greedy":
        return GreedyScheduler(average_weights(config.nodes), config.N)
    if args.policy is not None:
        policies = load_policy_artifact(args.policy, config).policies
    else:
        policies = relaxed_policy(config.nodes, config.N).policies
    if name == "relaxed":
        return RelaxedScheduler(policies)
    return NearStationaryScheduler(policies, config.N)


def cmd_simulate(args: argparse.Namespace) -> int:
    """Simulate one scheduler over one or more seeds; one CSV row per seed."""
    config = load_system_config(args.config)
    if args.T is not None:
        config = dataclasses.replace(config, T=args.T)
    scheduler = _build_scheduler(args, config)
    if scheduler.N is None:
        # every request is granted, so the engine cap is lifted to M
        config = dataclasses.replace(config, N=config.M)
    seeds: List[int] = args.seed if args.seed else [config.seed]
    rows = []
    for seed in seeds:
        result = run(config, scheduler, seed=seed, burn_in=args.burn_in)
        rows.append(
            (
                result.scheduler,
                str(result.seed),
                str(result.T),
                _fmt(result.J_avg),
                _fmt(result.D_avg),
            )
        )
    _write_csv(args.out, SIMULATE_HEADER, rows)
    return EXIT_OK


def _sweep_rows(rows: Sequence[SweepRow]) -> List[Sequence[str]]:
    return [
        (
            _fmt(row.x),
            _fmt(row.J_ours_mean),
            _fmt(row.J_ours_se),
            _fmt(row.J_greedy_mean),
            _fmt(row.J_greedy_se),
            _fmt(row.J_lower),
        )
        for row in rows
    ]


def cmd_sweep(args: argparse.Namespace) -> int:
    """Reference-scenario sweep over the cap N (mode n) or the self-transition q (mode q)."""
    values = args.values or []
    if args.mode == "n":
        if any(v != int(v) for v in values):
            raise ConfigurationError(f"Caps N must be integers, got {values}")
        rows = sweep_N(args.q, [int(v) for v in values], args.T, args.seeds, args.seed)
    else:
        rows = sweep_q(values, args.N, args.T, args.seeds, args.seed)
    _write_csv(args.out, SWEEP_HEADER, _sweep_rows(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aos-sched",
        description="Weighted Age of Synchronization scheduling under a per-slot bandwidth cap.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for progress, -vv for solver detail"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve the relaxed problem and write a policy artifact")
    solve.add_argument("--config", required=True, help="system configuration (JSON)")
    target = solve.add_mutually_exclusive_group()
    target.add_argument("--N", type=int, help="bandwidth budget (defaults to the config's N)")
    target.add_argument("--eta", type=float, help="solve every node at this fixed price instead")
    solve.add_argument("--out", required=True, help="policy artifact path (JSON)")
    solve.set_defaults(handler=cmd_solve)

    simulate = sub.add_parser("simulate", help="simulate a scheduler and write per-seed averages")
    simulate.add_argument("--config", required=True, help="system configuration (JSON)")
    simulate.add_argument(
        "--policy", help="policy artifact from 'solve'; solved on the fly if absent"
    )
    simulate.add_argument("--greedy", action="store_true", help="shortcut for --scheduler greedy")
    simulate.add_argument("--scheduler", choices=SCHEDULERS, default="ours")
    simulate.add_argument(
        "--seed", type=int, nargs="+", help="one or more seeds (default: config seed)"
    )
    simulate.add_argument("--T", type=int, help="override the configured horizon")
    simulate.add_argument("--burn-in", type=int, default=0, help="slots dropped from the averages")
    simulate.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    simulate.set_defaults(handler=cmd_simulate)

    sweep = sub.add_parser(
        "sweep", help="compare schedulers across N or q on the reference scenario"
    )
    sweep.add_argument("--mode", choices=("n", "q"), required=True)
    sweep.add_argument(
        "--q", type=float, default=DEFAULT_SWEEP_Q, help="self-transition probability (mode n)"
    )
    sweep.add_argument("--N", type=int, default=DEFAULT_SWEEP_N, help="bandwidth cap (mode q)")
    sweep.add_argument("--values", type=float, nargs="*", help="swept values of N or q")
    sweep.add_argument("--T", type=int, default=DEFAULT_SWEEP_T)
    sweep.add_argument("--seeds", type=int, default=DEFAULT_SEEDS, help="runs per point")
    sweep.add_argument("--seed", type=int, default=0, help="master seed")
    sweep.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    sweep.set_defaults(handler=cmd_sweep)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return int(args.handler(args))
    except ConfigurationError as e:
        logger.error("Configuration error: %s", e)
        return EXIT_CONFIG
    except AosError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
