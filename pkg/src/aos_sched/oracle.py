# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

"""
Reference solvers for the truncated per-node MDP.

These are slow on purpose and only meant to validate the LP: relative value
iteration, exhaustive search over threshold policies, and a direct stationary solve.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import ConfigurationError, OracleError
from .markov import Kernel, stationary_distribution
from .node_mdp import IDLE, TRANSMIT, TruncatedMdp, policy_cost, policy_kernel

logger = logging.getLogger(__name__)

RVI_TOL = 1e-10
RVI_MAX_ITER = 10**6
# Self-loop mixing that makes every induced chain aperiodic without changing the gain.
APERIODICITY = 0.5
TIE_TOL = 1e-9
MAX_ENUMERATION = 10**5


@dataclass(frozen=True, eq=False)
class RviResult:
    """
    Attributes:
        gain (float): Optimal long-run average cost.
        policy (np.ndarray): (S_max+1, R) deterministic optimal actions (0 idle, 1 transmit).
        bias (np.ndarray): (S_max+1, R) relative values, zero at (s=0, r=0).
        iterations (int): Sweeps performed.
    """

    gain: float
    policy: np.ndarray
    bias: np.ndarray
    iterations: int


def rvi_average_cost(
    mdp: TruncatedMdp,
    tol: float = RVI_TOL,
    max_iter: int = RVI_MAX_ITER,
) -> RviResult:
    """
    Relative value iteration with reference state (s=0, r=0).

    Stops once the span of successive value differences drops below ``tol``.

    Raises:
        OracleError: If ``max_iter`` sweeps do not converge.
    """
    idle = mdp.kernels[IDLE].toarray()
    transmit = mdp.kernels[TRANSMIT].toarray()
    n = mdp.n_states
    ref = mdp.index(0, 0)
    inadmissible_idle = ~mdp.admissible[:, IDLE]
    h = np.zeros(n)

    for iteration in range(1, max_iter + 1):
        q_idle = mdp.costs[:, IDLE] + APERIODICITY * (idle @ h) + (1.0 - APERIODICITY) * h
        q_transmit = (
            mdp.costs[:, TRANSMIT] + APERIODICITY * (transmit @ h) + (1.0 - APERIODICITY) * h
        )
        q_idle[inadmissible_idle] = np.inf
        updated = np.minimum(q_idle, q_transmit)
        diff = updated - h
        span = float(diff.max() - diff.min())
        h = updated - updated[ref]
        if span < tol:
            gain = float(0.5 * (diff.max() + diff.min()))
            policy = (q_transmit < q_idle - TIE_TOL).astype(int)
            shape = (mdp.s_max + 1, mdp.R)
            logger.debug("RVI converged after %d sweeps, gain %.12g", iteration, gain)
            return RviResult(
                gain=gain,
                policy=policy.reshape(shape),
                bias=h.reshape(shape),
                iterations=iteration,
            )
    raise OracleError(f"Relative value iteration did not converge in {max_iter} sweeps")


def chain_stationary(kernel: Kernel) -> np.ndarray:
    """Stationary distribution of the chain induced by a fixed policy."""
    return stationary_distribution(kernel)


def average_cost(mdp: TruncatedMdp, xi: np.ndarray) -> float:
    """Long-run average cost of a stationary policy with transmit probabilities ``xi``."""
    pi = chain_stationary(policy_kernel(mdp, xi))
    return float(pi @ policy_cost(mdp, xi))


def threshold_policy(mdp: TruncatedMdp, tau: Tuple[int, ...]) -> np.ndarray:
    """Deterministic policy transmitting in (s, r) iff ``1 <= tau[r] <= s``; always at the cap."""
    aos = np.arange(mdp.s_max + 1)[:, None]
    xi = (aos >= np.asarray(tau)[None, :]).astype(float)
    xi[0] = 0.0
    xi[-1] = 1.0
    return xi


def enumerate_threshold_policies(mdp: TruncatedMdp) -> Tuple[Tuple[int, ...], float]:
    """
    Exhaustive search over threshold vectors ``tau[r] in {1..S_max}``.

    Raises:
        ConfigurationError: If the search space exceeds ``MAX_ENUMERATION`` policies.
    """
    count = mdp.s_max**mdp.R
    if count > MAX_ENUMERATION:
        raise ConfigurationError(
            f"{count} threshold vectors exceed the enumeration limit {MAX_ENUMERATION}"
        )
    best_tau: Tuple[int, ...] = ()
    best_gain = np.inf
    for tau in itertools.product(range(1, mdp.s_max + 1), repeat=mdp.R):
        gain = average_cost(mdp, threshold_policy(mdp, tau))
        if gain < best_gain:
            best_tau, best_gain = tau, gain
    logger.debug("Best of %d threshold policies: tau=%s, gain %.12g", count, best_tau, best_gain)
    return best_tau, float(best_gain)
