# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

"""
Lagrangian relaxation of the per-slot bandwidth cap.

The cap ``sum_i u_i(t) <= N`` is relaxed to a time-average budget, priced by a single
multiplier eta shared by all nodes. The system transmission rate D*(eta) is a
non-increasing step function, so the relaxed optimum mixes the per-node solutions at
two prices straddling the budget.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, List, Sequence, Tuple

import numpy as np

from .errors import BracketError, ConfigurationError
from .lp_policy import OccupationSolution, TransmitPolicy, extract_policy, solve_node
from .model import NodeConfig
from .parallel import ordered_map

logger = logging.getLogger(__name__)

ETA_MIN = 1e-6
ETA_START = 1.0
ETA_TOL = 1e-6
MAX_DOUBLINGS = 64
BUDGET_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MultiplierBracket:
    """
    Two prices whose system transmission rates straddle the budget N.

    Attributes:
        eta1 (float): Lower price, with ``D1 >= N``.
        eta2 (float): Upper price, with ``D2 <= N``.
        D1 (float): System transmission rate at eta1.
        D2 (float): System transmission rate at eta2.
        solutions1 (tuple[OccupationSolution, ...]): Per-node solutions at eta1.
        solutions2 (tuple[OccupationSolution, ...]): Per-node solutions at eta2.
        probes (tuple[tuple[float, float], ...]): Every (eta, D) evaluated, in order.
    """

    eta1: float
    eta2: float
    D1: float
    D2: float
    solutions1: Tuple[OccupationSolution, ...] = field(repr=False)
    solutions2: Tuple[OccupationSolution, ...] = field(repr=False)
    probes: Tuple[Tuple[float, float], ...] = field(default=(), repr=False)

    @property
    def degenerate(self) -> bool:
        return self.eta1 == self.eta2


@dataclass(frozen=True, eq=False)
class RelaxedSolution:
    """
    Optimal policy of the relaxed (time-average budget) problem.

    Attributes:
        policies (tuple[TransmitPolicy, ...]): Per-node transmit probabilities of the mixture.
        mixed (tuple[OccupationSolution, ...]): Per-node mixed occupation measures.
        alpha (float): Weight of the eta1 solutions in the mixture.
        J_re (float): Weighted AoS of the relaxed optimum, a lower bound for any policy
            meeting the per-slot cap.
        D_re (float): Transmission rate of the relaxed optimum.
        bracket (MultiplierBracket): Prices the mixture was built from.
    """

    policies: Tuple[TransmitPolicy, ...]
    mixed: Tuple[OccupationSolution, ...]
    alpha: float
    J_re: float
    D_re: float
    bracket: MultiplierBracket

    @property
    def eta1(self) -> float:
        return self.bracket.eta1

    @property
    def eta2(self) -> float:
        return self.bracket.eta2


def solve_all(
    eta: float, nodes: Sequence[NodeConfig], **solve_kwargs: Any
) -> List[OccupationSolution]:
    """Per-node optimal solutions at one price; nodes are solved independently."""
    return ordered_map(lambda node: solve_node(node, eta, **solve_kwargs), list(nodes))


def system_D(eta: float, nodes: Sequence[NodeConfig], **solve_kwargs: Any) -> float:
    """System time-average transmission rate D*(eta)."""
    return float(sum(sol.D for sol in solve_all(eta, nodes, **solve_kwargs)))


def lagrangian_value(
    eta: float, nodes: Sequence[NodeConfig], N: float, **solve_kwargs: Any
) -> float:
    """Dual function ``J*(eta) + eta * D*(eta) - eta * N``; never above the relaxed optimum."""
    solutions = solve_all(eta, nodes, **solve_kwargs)
    return float(sum(sol.J + eta * sol.D for sol in solutions) - eta * N)


def bracket_multiplier(
    nodes: Sequence[NodeConfig],
    N: float,
    eta_tol: float = ETA_TOL,
    eta_min: float = ETA_MIN,
    eta_start: float = ETA_START,
    max_doublings: int = MAX_DOUBLINGS,
    **solve_kwargs: Any,
) -> MultiplierBracket:
    """
    Bisect on eta for a pair of prices straddling the budget.

    If the budget already holds at ``eta_min`` the constraint is inactive and the
    degenerate bracket ``eta1 == eta2 == eta_min`` is returned.

    Raises:
        BracketError: If doubling the upper price never brings D* under the budget.
    """
    if N <= 0:
        raise ConfigurationError(f"Budget N must be positive, got {N}")
    probes: List[Tuple[float, float]] = []

    def evaluate(eta: float) -> Tuple[Tuple[OccupationSolution, ...], float]:
        solutions = tuple(solve_all(eta, nodes, **solve_kwargs))
        D = float(sum(sol.D for sol in solutions))
        probes.append((eta, D))
        logger.debug("Probe eta=%.9g gives D=%.9g (budget %s)", eta, D, N)
        return solutions, D

    lo, (lo_solutions, D_lo) = eta_min, evaluate(eta_min)
    if D_lo <= N + BUDGET_TOL:
        logger.info("Bandwidth budget %s is slack (D=%.6g at eta=%.1e)", N, D_lo, eta_min)
        return MultiplierBracket(
            eta1=lo,
            eta2=lo,
            D1=D_lo,
            D2=D_lo,
            solutions1=lo_solutions,
            solutions2=lo_solutions,
            probes=tuple(probes),
        )

    hi = eta_start
    hi_solutions, D_hi = evaluate(hi)
    doublings = 0
    while D_hi > N + BUDGET_TOL:
        if doublings >= max_doublings:
            raise BracketError(
                f"D*(eta) stayed above the budget {N} up to eta={hi:.3e} (D={D_hi:.6g})"
            )
        lo, lo_solutions, D_lo = hi, hi_solutions, D_hi
        hi *= 2.0
        hi_solutions, D_hi = evaluate(hi)
        doublings += 1

    while hi - lo > eta_tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        mid_solutions, D_mid = evaluate(mid)
        if abs(D_mid - N) <= BUDGET_TOL:
            logger.info("Price eta=%.9g meets the budget exactly", mid)
            return MultiplierBracket(
                eta1=mid,
                eta2=mid,
                D1=D_mid,
                D2=D_mid,
                solutions1=mid_solutions,
                solutions2=mid_solutions,
                probes=tuple(probes),
            )
        if D_mid > N:
            lo, lo_solutions, D_lo = mid, mid_solutions, D_mid
        else:
            hi, hi_solutions, D_hi = mid, mid_solutions, D_mid

    ordered = sorted(probes)
    if any(later[1] > earlier[1] + BUDGET_TOL for earlier, later in zip(ordered, ordered[1:])):
        logger.warning("D*(eta) was not monotone along the bisection probes")
    logger.info(
        "Bracket found: eta1=%.9g (D=%.6g), eta2=%.9g (D=%.6g) after %d probes",
        lo,
        D_lo,
        hi,
        D_hi,
        len(probes),
    )
    return MultiplierBracket(
        eta1=lo,
        eta2=hi,
        D1=D_lo,
        D2=D_hi,
        solutions1=lo_solutions,
        solutions2=hi_solutions,
        probes=tuple(probes),
    )


def compute_alpha(D1: float, D2: float, N: float) -> float:
    """
    Mixing weight putting the time-average transmission rate exactly on the budget.

    Raises:
        BracketError: If the rates do not straddle N, or coincide away from N.
    """
    if D1 < N - BUDGET_TOL or D2 > N + BUDGET_TOL:
        raise BracketError(f"Rates D1={D1} and D2={D2} do not straddle the budget {N}")
    if D1 - D2 <= BUDGET_TOL:
        if abs(D1 - N) <= BUDGET_TOL:
            return 1.0
        raise BracketError(f"Degenerate bracket: D1={D1} equals D2={D2} but differs from N={N}")
    return float(np.clip((N - D2) / (D1 - D2), 0.0, 1.0))


def mix_solutions(
    sol1: OccupationSolution, sol2: OccupationSolution, alpha: float
) -> OccupationSolution:
    """
    Convex combination ``alpha * sol1 + (1 - alpha) * sol2`` of two occupation measures,
    with the shorter one zero-padded to the larger truncation bound.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ConfigurationError(f"alpha must lie in [0, 1], got {alpha}")
    if sol1.R != sol2.R or not np.array_equal(sol1.omega, sol2.omega):
        raise ConfigurationError("Cannot mix solutions of different nodes")
    s_max = max(sol1.s_max, sol2.s_max)

    def padded(values: np.ndarray) -> np.ndarray:
        out = np.zeros((s_max + 1, values.shape[1]))
        out[: values.shape[0]] = values
        return out

    mu = alpha * padded(sol1.mu) + (1.0 - alpha) * padded(sol2.mu)
    nu = alpha * padded(sol1.nu) + (1.0 - alpha) * padded(sol2.nu)
    return OccupationSolution.from_measures(mu, np.minimum(nu, mu), sol1.omega, eta=None)


def relaxed_policy(nodes: Sequence[NodeConfig], N: float, **bracket_kwargs: Any) -> RelaxedSolution:
    """
    Optimal stationary policy of the relaxed problem and its analytic lower bound J_re.

    The mixing weight comes from the system-level rates at the two bracketing prices.
    """
    bracket = bracket_multiplier(nodes, N, **bracket_kwargs)
    if bracket.degenerate:
        alpha = 1.0
        mixed = bracket.solutions1
    else:
        alpha = compute_alpha(bracket.D1, bracket.D2, N)
        mixed = tuple(
            mix_solutions(sol1, sol2, alpha)
            for sol1, sol2 in zip(bracket.solutions1, bracket.solutions2)
        )
    policies = tuple(extract_policy(sol) for sol in mixed)
    J_re = float(sum(sol.J for sol in mixed))
    D_re = float(sum(sol.D for sol in mixed))
    logger.info(
        "Relaxed policy for N=%s: alpha=%.6f, J_re=%.6g, D_re=%.9g", N, alpha, J_re, D_re
    )
    return RelaxedSolution(
        policies=policies,
        mixed=tuple(mixed),
        alpha=alpha,
        J_re=J_re,
        D_re=D_re,
        bracket=bracket,
    )
