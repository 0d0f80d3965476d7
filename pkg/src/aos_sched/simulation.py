# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

"""
Seeded slotted-time Monte Carlo simulation of the full system.

Randomness layout: the master seed is split with ``numpy.random.SeedSequence`` into one
stream per node plus one scheduler stream. Every slot, each node stream yields three
uniforms in a fixed order (arrival, weight transition, transmit request), whatever the
scheduler; so two schedulers run with the same seed see identical arrivals and weights.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError, SimulationError
from .lagrange import RelaxedSolution, relaxed_policy
from .model import (
    StackedNodes,
    SystemConfig,
    average_weights,
    make_paper_config,
    stationary_weights,
    step_nodes,
)
from .parallel import ordered_map
from .scheduler import GreedyScheduler, NearStationaryScheduler, Scheduler

logger = logging.getLogger(__name__)

DEFAULT_SEEDS = 5
CHUNK_SLOTS = 4096
DRAWS_PER_SLOT = 3


@dataclass(frozen=True)
class SimResult:
    """
    Time averages of one simulation run.

    Attributes:
        J_avg (float): Time-average weighted-sum AoS.
        D_avg (float): Time-average transmissions per slot.
        per_node_J (tuple[float, ...]): Time-average weighted AoS of each node.
        T (int): Slots averaged over (after burn-in).
        seed (int): Seed of the run.
        scheduler (str): Scheduler name.
        max_slot_transmissions (int): Largest number of transmissions seen in one slot.
        occupancy (np.ndarray | None): (M, s_cap+1, R) empirical (s, r) frequencies when
            requested; AoS values above ``s_cap`` are counted in the last bin.
    """

    J_avg: float
    D_avg: float
    per_node_J: Tuple[float, ...]
    T: int
    seed: int
    scheduler: str = ""
    max_slot_transmissions: int = 0
    occupancy: Optional[np.ndarray] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SweepRow:
    """One sweep point: x is N or q; means and standard errors over seeds."""

    x: float
    J_ours_mean: float
    J_ours_se: float
    J_greedy_mean: float
    J_greedy_se: float
    J_lower: float


def derive_seeds(master_seed: int, count: int) -> List[int]:
    """Per-run seeds drawn from the master seed."""
    if count < 1:
        raise ConfigurationError(f"At least one seed is required, got {count}")
    return [int(v) for v in np.random.SeedSequence(master_seed).generate_state(count)]


def run(
    config: SystemConfig,
    scheduler: Scheduler,
    seed: Optional[int] = None,
    burn_in: int = 0,
    track_occupancy: Optional[int] = None,
) -> SimResult:
    """
    Simulate ``config.T`` slots under ``scheduler``.

    Each slot the weighted AoS of the current states is accumulated, the scheduler decides,
    and every node advances. Nodes start synchronised with a weight state drawn from the
    stationary distribution of their chain.

    Raises:
        SimulationError: If a decision exceeds the per-slot cap ``config.N``.
    """
    seed = config.seed if seed is None else int(seed)
    if not 0 <= burn_in < config.T:
        raise ConfigurationError(f"burn_in must lie in [0, T), got {burn_in}")
    M = config.M
    stacked = StackedNodes.from_nodes(config.nodes)
    children = np.random.SeedSequence(seed).spawn(M + 1)
    node_rngs = [np.random.default_rng(child) for child in children[:M]]
    scheduler_rng = np.random.default_rng(children[M])

    nodes_idx = np.arange(M)
    initial_draws = np.array([rng.random() for rng in node_rngs])
    # stationary start: one inverse-CDF draw per node from its stationary weight distribution
    start_cdf = np.ones((M, stacked.cum_P.shape[1]))
    for i, node in enumerate(config.nodes):
        cdf = np.cumsum(stationary_weights(node.chain))
        cdf[-1] = 1.0
        start_cdf[i, : node.R] = cdf
    r = np.sum(start_cdf <= initial_draws[:, None], axis=1)
    s = np.zeros(M, dtype=np.int64)

    weighted_total = np.zeros(M)
    transmissions = 0
    max_slot = 0
    occupancy = None
    if track_occupancy is not None:
        occupancy = np.zeros((M, track_occupancy + 1, stacked.cum_P.shape[1]))

    t = 0
    while t < config.T:
        block = min(CHUNK_SLOTS, config.T - t)
        draws = np.stack([rng.random((block, DRAWS_PER_SLOT)) for rng in node_rngs], axis=1)
        for k in range(block):
            slot = draws[k]
            counted = t >= burn_in
            if counted:
                weighted_total += stacked.omega[nodes_idx, r] * s
                if occupancy is not None:
                    occupancy[nodes_idx, np.minimum(s, track_occupancy), r] += 1.0
            u = scheduler.decide(s, r, slot[:, 2], scheduler_rng)
            count = int(np.count_nonzero(u))
            if count > config.N:
                raise SimulationError(
                    f"Slot {t} scheduled {count} transmissions over the cap N={config.N}"
                )
            if counted:
                transmissions += count
                max_slot = max(max_slot, count)
            s, r = step_nodes(s, r, u, slot[:, 0] < stacked.lam, slot[:, 1], stacked)
            t += 1

    horizon = config.T - burn_in
    per_node = weighted_total / horizon
    if occupancy is not None:
        occupancy /= horizon
    result = SimResult(
        J_avg=float(per_node.sum()),
        D_avg=transmissions / horizon,
        per_node_J=tuple(float(v) for v in per_node),
        T=horizon,
        seed=seed,
        scheduler=scheduler.name,
        max_slot_transmissions=max_slot,
        occupancy=occupancy,
    )
    logger.info(
        "Simulated %d slots with %s (seed %d): J=%.6g, D=%.6g",
        horizon,
        scheduler.name,
        seed,
        result.J_avg,
        result.D_avg,
    )
    return result


def _mean_se(values: Sequence[float]) -> Tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        return float(arr.mean()), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def _resolve_seeds(seeds: Union[int, Sequence[int]], master_seed: int) -> List[int]:
    if isinstance(seeds, (int, np.integer)):
        return derive_seeds(master_seed, int(seeds))
    seeds = [int(v) for v in seeds]
    if not seeds:
        raise ConfigurationError("At least one seed is required")
    return seeds


def evaluate_point(
    config: SystemConfig,
    seeds: Sequence[int],
    relaxed: Optional[RelaxedSolution] = None,
) -> Tuple[RelaxedSolution, List[SimResult], List[SimResult]]:
    """Relaxed solve plus near-stationary and greedy runs over ``seeds`` for one config."""
    if relaxed is None:
        relaxed = relaxed_policy(config.nodes, config.N)
    ours = NearStationaryScheduler(relaxed.policies, config.N)
    greedy = GreedyScheduler(average_weights(config.nodes), config.N)
    jobs = [(scheduler, seed) for scheduler in (ours, greedy) for seed in seeds]
    results = ordered_map(lambda job: run(config, job[0], job[1]), jobs)
    return relaxed, results[: len(seeds)], results[len(seeds) :]


def _sweep(
    xs: Sequence[float],
    make_config: Callable[[float], SystemConfig],
    seeds: Union[int, Sequence[int]],
    master_seed: int,
) -> List[SweepRow]:
    if len(xs) == 0:
        raise ConfigurationError("Sweep range is empty")
    run_seeds = _resolve_seeds(seeds, master_seed)
    rows = []
    for x in xs:
        relaxed, ours, greedy = evaluate_point(make_config(x), run_seeds)
        J_ours, se_ours = _mean_se([res.J_avg for res in ours])
        J_greedy, se_greedy = _mean_se([res.J_avg for res in greedy])
        rows.append(
            SweepRow(
                x=float(x),
                J_ours_mean=J_ours,
                J_ours_se=se_ours,
                J_greedy_mean=J_greedy,
                J_greedy_se=se_greedy,
                J_lower=relaxed.J_re,
            )
        )
        logger.info(
            "Sweep point x=%s: ours %.6g, greedy %.6g, lower bound %.6g",
            x,
            J_ours,
            J_greedy,
            relaxed.J_re,
        )
    return rows


def sweep_N(
    q: float,
    N_list: Sequence[int],
    T: int,
    seeds: Union[int, Sequence[int]] = DEFAULT_SEEDS,
    master_seed: int = 0,
) -> List[SweepRow]:
    """Weighted AoS of our policy, the greedy baseline and the relaxed bound across caps N."""
    return _sweep(
        [int(N) for N in N_list],
        lambda N: make_paper_config(q, int(N), T, master_seed),
        seeds,
        master_seed,
    )


def sweep_q(
    q_list: Sequence[float],
    N: int,
    T: int,
    seeds: Union[int, Sequence[int]] = DEFAULT_SEEDS,
    master_seed: int = 0,
) -> List[SweepRow]:
    """Same comparison across self-transition probabilities q at a fixed cap."""
    return _sweep(
        [float(q) for q in q_list],
        lambda q: make_paper_config(q, N, T, master_seed),
        seeds,
        master_seed,
    )
