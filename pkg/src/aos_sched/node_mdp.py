# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

"""
Finite per-node MDP over {0..S_max} x {0..R-1} with actions idle (0) and transmit (1).

The same kernel feeds the occupation-measure LP and the reference solvers, so both
always see the same model.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, ThresholdViolationError
from .model import NodeConfig

if TYPE_CHECKING:
    from .lp_policy import TransmitPolicy

logger = logging.getLogger(__name__)

IDLE = 0
TRANSMIT = 1

FRACTIONAL_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class TruncatedMdp:
    """
    Truncated average-cost MDP for one node at a fixed Lagrange multiplier.

    State (s, r) is stored at flat index ``s * R + r``. At ``s = S_max`` only the
    transmit action is admissible; the idle kernel row there mirrors the transmit row
    so that occupation measures with nu = mu at the cap see a consistent model.

    Attributes:
        s_max (int): AoS truncation bound.
        lam (float): Arrival probability.
        P (np.ndarray): Weight transition matrix.
        omega (np.ndarray): Weight values.
        eta (float): Price per transmission.
        kernels (tuple[sp.csr_matrix, sp.csr_matrix]): Transition matrices for idle and transmit.
        costs (np.ndarray): (n_states, 2) per-slot cost ``omega(r) * s + eta * u``.
        admissible (np.ndarray): (n_states, 2) boolean action mask.
    """

    s_max: int
    lam: float
    P: np.ndarray
    omega: np.ndarray
    eta: float
    kernels: Tuple[sp.csr_matrix, sp.csr_matrix]
    costs: np.ndarray
    admissible: np.ndarray

    @property
    def R(self) -> int:
        return int(self.P.shape[0])

    @property
    def n_states(self) -> int:
        return (self.s_max + 1) * self.R

    def index(self, s: int, r: int) -> int:
        return s * self.R + r

    def aos_of_states(self) -> np.ndarray:
        return np.repeat(np.arange(self.s_max + 1), self.R)


def build_kernel(node: NodeConfig, s_max: int, eta: float) -> TruncatedMdp:
    """Build the truncated per-node MDP (kernel, costs, admissible actions)."""
    if s_max < 1:
        raise ConfigurationError(f"S_max must be at least 1, got {s_max}")
    if eta < 0:
        raise ConfigurationError(f"eta must be non-negative, got {eta}")
    R = node.R
    P = node.P
    lam = node.lam
    n = (s_max + 1) * R

    src_r = np.repeat(np.arange(R), R)
    dst_r = np.tile(np.arange(R), R)
    parts: Tuple[Tuple[list, list, list], ...] = (([], [], []), ([], [], []))
    for s in range(s_max + 1):
        for action in (IDLE, TRANSMIT):
            # the idle row at the cap mirrors the forced transmission
            if s == 0 or s == s_max or action == TRANSMIT:
                targets: Tuple[Tuple[int, float], ...] = ((0, 1.0 - lam), (1, lam))
            else:
                targets = ((s + 1, 1.0),)
            kernel_rows, kernel_cols, kernel_vals = parts[action]
            for dst_s, scale in targets:
                if scale > 0.0:
                    kernel_rows.append(s * R + src_r)
                    kernel_cols.append(dst_s * R + dst_r)
                    kernel_vals.append(scale * P.ravel())

    kernels = []
    for kernel_rows, kernel_cols, kernel_vals in parts:
        kernel = sp.csr_matrix(
            (
                np.concatenate(kernel_vals),
                (np.concatenate(kernel_rows), np.concatenate(kernel_cols)),
            ),
            shape=(n, n),
        )
        kernel.eliminate_zeros()
        kernels.append(kernel)

    aos = np.repeat(np.arange(s_max + 1), R)
    weights = np.tile(node.omega, s_max + 1)
    costs = np.column_stack([weights * aos, weights * aos + eta])
    admissible = np.ones((n, 2), dtype=bool)
    admissible[s_max * R :, IDLE] = False

    logger.debug("Built kernel with S_max=%d, R=%d, lambda=%.4f, eta=%.6g", s_max, R, lam, eta)
    return TruncatedMdp(
        s_max=s_max,
        lam=lam,
        P=P,
        omega=node.omega,
        eta=float(eta),
        kernels=(kernels[IDLE], kernels[TRANSMIT]),
        costs=costs,
        admissible=admissible,
    )


def policy_kernel(mdp: TruncatedMdp, xi: np.ndarray) -> sp.csr_matrix:
    """Transition matrix of the chain induced by transmit probabilities ``xi[s, r]``."""
    p = np.asarray(xi, dtype=float).reshape(-1)
    if p.shape[0] != mdp.n_states:
        raise ConfigurationError(
            f"Policy covers {p.shape[0]} states, the MDP has {mdp.n_states}"
        )
    idle, transmit = mdp.kernels
    return (sp.diags(1.0 - p) @ idle + sp.diags(p) @ transmit).tocsr()


def policy_cost(mdp: TruncatedMdp, xi: np.ndarray) -> np.ndarray:
    """Expected one-slot cost in each state under transmit probabilities ``xi``."""
    p = np.asarray(xi, dtype=float).reshape(-1)
    return (1.0 - p) * mdp.costs[:, IDLE] + p * mdp.costs[:, TRANSMIT]


@dataclass(frozen=True)
class ThresholdProfile:
    """
    Thresholds of a monotone transmit policy.

    Attributes:
        tau (tuple[int, ...]): Per weight state, the smallest AoS from which the node always
            transmits on reachable states.
        fractional_state (tuple[int | None, ...]): Per weight state, the single boundary AoS
            with a transmit probability strictly between 0 and 1, if any.
    """

    tau: Tuple[int, ...]
    fractional_state: Tuple[Optional[int], ...]


def check_threshold(
    policy: Union["TransmitPolicy", np.ndarray],
    reachable: Optional[np.ndarray] = None,
    tol: float = FRACTIONAL_TOL,
) -> ThresholdProfile:
    """
    Verify that a policy is threshold-structured on the reachable states.

    For every weight state the reachable AoS values, in increasing order, must read
    idle..., at most one fractional state, then transmit... .

    Raises:
        ThresholdViolationError: At the first reachable state breaking that pattern.
    """
    xi = np.asarray(getattr(policy, "xi", policy), dtype=float)
    if reachable is None:
        reachable = np.ones(xi.shape, dtype=bool)
    reachable = np.asarray(reachable, dtype=bool).reshape(xi.shape)

    taus = []
    fractional = []
    for r in range(xi.shape[1]):
        phase = 0  # 0: idle run, 1: after the fractional boundary, 2: transmit run
        tau: Optional[int] = None
        frac: Optional[int] = None
        last_reachable = -1
        for s in np.flatnonzero(reachable[:, r]):
            value = xi[s, r]
            last_reachable = int(s)
            if value <= tol:
                if phase > 0:
                    raise ThresholdViolationError(int(s), r, float(value))
            elif value >= 1.0 - tol:
                if phase < 2:
                    tau = int(s)
                phase = 2
            else:
                if phase > 0:
                    raise ThresholdViolationError(int(s), r, float(value))
                frac = int(s)
                phase = 1
        if tau is None:
            tau = last_reachable + 1
        taus.append(tau)
        fractional.append(frac)
    return ThresholdProfile(tau=tuple(taus), fractional_state=tuple(fractional))
