# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

"""
Slot-by-slot scheduling decisions under the per-slot bandwidth cap.

Schedulers work on the vectorised node state (``s`` and ``r`` arrays) so the simulation
engine can call them once per slot. The functional wrappers ``near_stationary_schedule``
and ``greedy_schedule`` accept lists of ``NodeState``.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigurationError, SimulationError
from .lp_policy import TransmitPolicy
from .model import NodeState

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ScheduleDecision:
    """
    Transmissions granted in one slot.

    Attributes:
        u (np.ndarray): Length-M boolean vector, True for nodes that transmit.
        N (int | None): Cap the decision was taken under; None when uncapped.
    """

    u: np.ndarray
    N: Optional[int] = None

    def __post_init__(self) -> None:
        granted = int(np.count_nonzero(self.u))
        if self.N is not None and granted > self.N:
            raise SimulationError(f"Decision grants {granted} transmissions over the cap {self.N}")

    @property
    def granted(self) -> np.ndarray:
        return np.flatnonzero(self.u)


class Scheduler(ABC):
    """
    Base class of the per-slot schedulers.

    Attributes:
        name (str): Label used in result tables.
        N (int | None): Per-slot cap enforced by the scheduler; None when uncapped.
    """

    name = "scheduler"

    def __init__(self, N: Optional[int]) -> None:
        if N is not None and N < 1:
            raise ConfigurationError(f"Cap N must be at least 1, got {N}")
        self.N = N

    @abstractmethod
    def decide(
        self,
        s: np.ndarray,
        r: np.ndarray,
        request_uniforms: np.ndarray,
        rng: Optional[np.random.Generator],
    ) -> np.ndarray:
        """
        Boolean transmit vector for the current slot.

        Args:
            s: AoS of every node.
            r: Weight state of every node.
            request_uniforms: One uniform draw per node from the node's own stream.
            rng: Scheduler stream for any centralised randomness.
        """


class _PolicyScheduler(Scheduler):
    """Nodes request transmission independently with their stationary probabilities."""

    def __init__(self, policies: Sequence[TransmitPolicy], N: Optional[int]) -> None:
        super().__init__(N)
        if not policies:
            raise ConfigurationError("At least one node policy is required")
        self.policies = tuple(policies)
        self.s_max = np.array([policy.s_max for policy in policies])
        r_max = max(policy.R for policy in policies)
        # padded lookup table; the padding is never read because s is clamped per node
        self.xi = np.ones((len(policies), int(self.s_max.max()) + 1, r_max))
        for i, policy in enumerate(policies):
            self.xi[i, : policy.s_max + 1, : policy.R] = policy.xi
        self._nodes = np.arange(len(policies))

    def requests(self, s: np.ndarray, r: np.ndarray, request_uniforms: np.ndarray) -> np.ndarray:
        xi = self.xi[self._nodes, np.minimum(s, self.s_max), r]
        return request_uniforms < xi


class NearStationaryScheduler(_PolicyScheduler):
    """
    Stationary requests truncated to the cap: when more than N nodes request, a uniformly
    random N-subset of the requesters transmits.
    """

    name = "ours"

    def __init__(self, policies: Sequence[TransmitPolicy], N: int) -> None:
        super().__init__(policies, N)

    def decide(
        self,
        s: np.ndarray,
        r: np.ndarray,
        request_uniforms: np.ndarray,
        rng: Optional[np.random.Generator],
    ) -> np.ndarray:
        u = self.requests(s, r, request_uniforms)
        requesters = np.flatnonzero(u)
        if requesters.size > self.N:
            u = np.zeros_like(u)
            u[rng.choice(requesters, size=self.N, replace=False)] = True
        return u


class RelaxedScheduler(_PolicyScheduler):
    """The relaxed stationary policy itself: every request is granted, no cap."""

    name = "relaxed"

    def __init__(self, policies: Sequence[TransmitPolicy]) -> None:
        super().__init__(policies, None)

    def decide(
        self,
        s: np.ndarray,
        r: np.ndarray,
        request_uniforms: np.ndarray,
        rng: Optional[np.random.Generator],
    ) -> np.ndarray:
        return self.requests(s, r, request_uniforms)


class GreedyScheduler(Scheduler):
    """
    Weight-agnostic baseline: the N nodes with the largest ``s * average weight`` transmit.

    Synchronised nodes are never scheduled; ties go to the lowest node index.
    """

    name = "greedy"

    def __init__(self, avg_weight: Sequence[float], N: int) -> None:
        super().__init__(N)
        self.avg_weight = np.asarray(avg_weight, dtype=float)

    def decide(
        self,
        s: np.ndarray,
        r: np.ndarray,
        request_uniforms: np.ndarray,
        rng: Optional[np.random.Generator],
    ) -> np.ndarray:
        score = s * self.avg_weight
        order = np.argsort(-score, kind="stable")
        chosen = order[: self.N]
        u = np.zeros(s.shape[0], dtype=bool)
        u[chosen[score[chosen] > 0]] = True
        return u


def _state_arrays(states: Sequence[NodeState]) -> Tuple[np.ndarray, np.ndarray]:
    return (
        np.array([state.s for state in states], dtype=np.int64),
        np.array([state.r for state in states], dtype=np.int64),
    )


def near_stationary_schedule(
    states: Sequence[NodeState],
    policies: Sequence[TransmitPolicy],
    N: int,
    rng: np.random.Generator,
) -> ScheduleDecision:
    """One slot of the near-stationary policy; request draws come from ``rng`` first."""
    if len(states) != len(policies):
        raise ConfigurationError(f"Got {len(states)} node states for {len(policies)} policies")
    s, r = _state_arrays(states)
    request_uniforms = rng.random(len(states))
    u = NearStationaryScheduler(policies, N).decide(s, r, request_uniforms, rng)
    return ScheduleDecision(u=u, N=N)


def greedy_schedule(
    states: Sequence[NodeState], avg_weight: Sequence[float], N: int
) -> ScheduleDecision:
    """One slot of the greedy baseline."""
    if len(states) != len(avg_weight):
        raise ConfigurationError(f"Got {len(states)} node states for {len(avg_weight)} weights")
    s, r = _state_arrays(states)
    u = GreedyScheduler(avg_weight, N).decide(s, r, np.zeros(len(states)), None)
    return ScheduleDecision(u=u, N=N)
