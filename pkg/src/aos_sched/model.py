# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

"""
Domain types and slot-level dynamics of the Age of Synchronization (AoS) model.

Weight states are 0-based indices ``r in {0..R-1}`` throughout the package.
Within one slot the arrival is counted toward the next state: a node that
transmits while a fresh update arrives ends the slot with AoS 1, not 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError
from .markov import stationary_distribution

logger = logging.getLogger(__name__)

STOCHASTIC_TOL = 1e-12

REFERENCE_NODE_COUNT = 40
REFERENCE_LAMBDA_RANGE = (0.9, 0.1)
REFERENCE_ZIPF_DELTA = 1.1
REFERENCE_WEIGHT_LEVELS = (1.0, 10.0)

ArrayOrInt = Union[np.ndarray, int]


@dataclass(frozen=True, eq=False)
class WeightChain:
    """
    Markov chain driving a node's weight state.

    Attributes:
        P (np.ndarray): R x R row-stochastic transition matrix.
        omega (np.ndarray): Length-R vector of positive weight values.
    """

    P: np.ndarray
    omega: np.ndarray

    def __post_init__(self) -> None:
        P = np.array(self.P, dtype=float, ndmin=2)
        omega = np.array(self.omega, dtype=float, ndmin=1)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 1:
            raise ConfigurationError(f"P must be a non-empty square matrix, got shape {P.shape}")
        if omega.shape != (P.shape[0],):
            raise ConfigurationError(
                f"omega must have length {P.shape[0]} to match P, got shape {omega.shape}"
            )
        if not (np.all(np.isfinite(P)) and np.all(np.isfinite(omega))):
            raise ConfigurationError("P and omega must be finite")
        if np.any(P < 0.0) or np.any(P > 1.0):
            raise ConfigurationError("P entries must lie in [0, 1]")
        if np.any(np.abs(P.sum(axis=1) - 1.0) > STOCHASTIC_TOL):
            raise ConfigurationError(f"Rows of P must sum to 1, got {P.sum(axis=1)}")
        if np.any(omega <= 0.0):
            raise ConfigurationError("omega entries must be positive")
        P.setflags(write=False)
        omega.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "omega", omega)

    @property
    def R(self) -> int:
        return int(self.P.shape[0])

    def cumulative(self) -> np.ndarray:
        """Row-wise CDF of P with the last column pinned to exactly 1."""
        cum = np.cumsum(self.P, axis=1)
        cum[:, -1] = 1.0
        return cum


@dataclass(frozen=True, eq=False)
class NodeConfig:
    """
    One node: its per-slot update arrival probability and its weight chain.

    Attributes:
        lam (float): Probability that a new update arrives in a slot.
        chain (WeightChain): Weight-state chain and weight values.
    """

    lam: float
    chain: WeightChain

    def __post_init__(self) -> None:
        if not 0.0 <= float(self.lam) <= 1.0:
            raise ConfigurationError(f"Arrival probability must lie in [0, 1], got {self.lam}")
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def R(self) -> int:
        return self.chain.R

    @property
    def P(self) -> np.ndarray:
        return self.chain.P

    @property
    def omega(self) -> np.ndarray:
        return self.chain.omega


@dataclass(frozen=True, eq=False)
class SystemConfig:
    """
    Full system: M nodes sharing a channel with at most N transmissions per slot.

    Attributes:
        N (int): Per-slot bandwidth cap.
        nodes (tuple[NodeConfig, ...]): The M nodes.
        T (int): Simulation horizon in slots.
        seed (int): Master RNG seed.
    """

    N: int
    nodes: Tuple[NodeConfig, ...]
    T: int
    seed: int = 0

    def __post_init__(self) -> None:
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if not nodes:
            raise ConfigurationError("A system needs at least one node")
        if not 1 <= int(self.N) <= len(nodes):
            raise ConfigurationError(f"N must satisfy 1 <= N <= M={len(nodes)}, got {self.N}")
        if int(self.T) < 1:
            raise ConfigurationError(f"T must be at least 1, got {self.T}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "T", int(self.T))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def M(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class NodeState:
    """AoS ``s`` (slots) and 0-based weight state ``r`` of a node at the start of a slot."""

    s: int = 0
    r: int = 0

    def __post_init__(self) -> None:
        if self.s < 0 or self.r < 0:
            raise ConfigurationError(f"Invalid node state (s={self.s}, r={self.r})")


@dataclass(frozen=True, eq=False)
class StackedNodes:
    """
    Per-node parameters padded into arrays so a slot can be advanced for all nodes at once.

    Rows beyond a node's own R repeat nothing meaningful: their CDF is all ones and their
    weight is zero, and they are never indexed because r stays below the node's R.
    """

    lam: np.ndarray
    omega: np.ndarray
    cum_P: np.ndarray
    R: np.ndarray = field(repr=False)

    @classmethod
    def from_nodes(cls, nodes: Sequence[NodeConfig]) -> "StackedNodes":
        r_max = max(node.R for node in nodes)
        M = len(nodes)
        omega = np.zeros((M, r_max))
        cum_P = np.ones((M, r_max, r_max))
        for i, node in enumerate(nodes):
            omega[i, : node.R] = node.omega
            cum_P[i, : node.R, : node.R] = node.chain.cumulative()
        return cls(
            lam=np.array([node.lam for node in nodes]),
            omega=omega,
            cum_P=cum_P,
            R=np.array([node.R for node in nodes]),
        )


def next_aos(s: ArrayOrInt, u: ArrayOrInt, arrival: ArrayOrInt) -> ArrayOrInt:
    """
    AoS transition shared by the scalar and vectorised steppers.

    A synchronised node (s=0) or a transmitting node restarts from the arrival
    indicator; an unsynchronised idle node ages by one slot.
    """
    s = np.asarray(s)
    restart = (s == 0) | np.asarray(u, dtype=bool)
    return np.where(restart, np.asarray(arrival, dtype=s.dtype), s + 1)


def next_weight_state(cum_rows: np.ndarray, uniforms: ArrayOrInt) -> np.ndarray:
    """Inverse-CDF draw of the next weight state from the current row(s) of cumulative P."""
    uniforms = np.asarray(uniforms, dtype=float)
    return np.sum(cum_rows <= uniforms[..., None], axis=-1)


def step_node(
    state: NodeState,
    u: int,
    arrival: int,
    chain: WeightChain,
    rng: np.random.Generator,
) -> NodeState:
    """
    Advance one node by one slot.

    The caller supplies the arrival indicator; the weight transition consumes one
    uniform draw from ``rng``.
    """
    if state.r >= chain.R:
        raise ConfigurationError(f"Weight state {state.r} out of range for R={chain.R}")
    s_next = int(next_aos(state.s, u, arrival))
    r_next = int(next_weight_state(chain.cumulative()[state.r], rng.random()))
    return NodeState(s=s_next, r=r_next)


def step_nodes(
    s: np.ndarray,
    r: np.ndarray,
    u: np.ndarray,
    arrivals: np.ndarray,
    weight_uniforms: np.ndarray,
    stacked: StackedNodes,
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised ``step_node`` over all nodes for one slot."""
    s_next = next_aos(s, u, arrivals)
    r_next = next_weight_state(stacked.cum_P[np.arange(s.shape[0]), r], weight_uniforms)
    return s_next, r_next


def weighted_aos(states: Sequence[NodeState], nodes: Sequence[NodeConfig]) -> float:
    """Weighted-sum AoS of the current slot."""
    if len(states) != len(nodes):
        raise ConfigurationError(
            f"Got {len(states)} node states for {len(nodes)} node configurations"
        )
    return float(sum(node.omega[state.r] * state.s for state, node in zip(states, nodes)))


def stationary_weights(chain: WeightChain) -> np.ndarray:
    """
    Unique stationary distribution of the weight chain.

    Raises:
        StationaryDistributionError: If the chain has more than one closed class.
    """
    return stationary_distribution(chain.P)


def average_weights(nodes: Sequence[NodeConfig]) -> np.ndarray:
    """Long-run expected weight of each node under its stationary weight distribution."""
    return np.array([float(stationary_weights(node.chain) @ node.omega) for node in nodes])


def make_paper_config(
    q: float,
    N: int,
    T: int,
    seed: int = 0,
    M: int = REFERENCE_NODE_COUNT,
    delta: float = REFERENCE_ZIPF_DELTA,
    levels: Tuple[float, float] = REFERENCE_WEIGHT_LEVELS,
) -> SystemConfig:
    """
    Reference scenario: M nodes, arrival rates spaced linearly from 0.9 down to 0.1,
    Zipf base importances ``1/i**delta`` and two weight levels driven by a symmetric
    chain with self-transition probability ``q``.
    """
    if not 0.0 < q < 1.0:
        raise ConfigurationError(f"Self-transition probability q must lie in (0, 1), got {q}")
    lam_hi, lam_lo = REFERENCE_LAMBDA_RANGE
    lams = np.linspace(lam_hi, lam_lo, M) if M > 1 else np.array([lam_hi])
    P = np.array([[q, 1.0 - q], [1.0 - q, q]])
    levels_arr = np.asarray(levels, dtype=float)
    nodes = tuple(
        NodeConfig(lam=float(lams[i]), chain=WeightChain(P=P, omega=levels_arr / (i + 1) ** delta))
        for i in range(M)
    )
    logger.debug("Built reference config with q=%s, N=%d, M=%d", q, N, M)
    return SystemConfig(N=N, nodes=nodes, T=int(T), seed=seed)
