# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

"""
Occupation-measure linear program for one node at a fixed transmission price.

Variables are the steady-state probabilities ``mu[s, r]`` and the transmit occupation
``nu[s, r] <= mu[s, r]``; the optimal stationary policy transmits in (s, r) with
probability ``nu / mu``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .errors import ConfigurationError, SolverError, TruncationError
from .model import NodeConfig
from .node_mdp import IDLE, TRANSMIT, TruncatedMdp, build_kernel

logger = logging.getLogger(__name__)

INITIAL_S_MAX = 32
MAX_S_MAX = 4096
CAP_MASS_TOL = 1e-8
FEASIBILITY_TOL = 1e-9
HARD_RESIDUAL_TOL = 1e-8
REACHABLE_TOL = 1e-10

# HiGHS dual simplex returns a basic (vertex) optimum; both tolerances are at the
# solver's minimum so the residual contract above holds on these small problems.
HIGHS_OPTIONS = {
    "presolve": True,
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """
    ``min c @ x`` subject to ``A_eq @ x == b_eq``, ``A_ub @ x <= b_ub`` and ``bounds``.

    Attributes:
        c (np.ndarray): Cost vector.
        A_eq (sp.csr_matrix): Equality constraint matrix.
        b_eq (np.ndarray): Equality right-hand side.
        bounds (np.ndarray): (n, 2) lower/upper variable bounds, ``inf`` for none.
        A_ub (sp.csr_matrix | None): Inequality constraint matrix.
        b_ub (np.ndarray | None): Inequality right-hand side.
    """

    c: np.ndarray
    A_eq: sp.csr_matrix
    b_eq: np.ndarray
    bounds: np.ndarray
    A_ub: Optional[sp.csr_matrix] = None
    b_ub: Optional[np.ndarray] = None

    @property
    def n_variables(self) -> int:
        return int(self.c.shape[0])

    @property
    def n_equalities(self) -> int:
        return int(self.A_eq.shape[0])


@dataclass(frozen=True, eq=False)
class LpResult:
    x: np.ndarray
    objective: float
    residual: float


@dataclass(frozen=True, eq=False)
class OccupationSolution:
    """
    Occupation measures of one node plus their time averages.

    Attributes:
        mu (np.ndarray): (S_max+1, R) steady-state probabilities.
        nu (np.ndarray): (S_max+1, R) steady-state probabilities of transmitting.
        omega (np.ndarray): Weight values of the node.
        s_max (int): Truncation bound used.
        eta (float | None): Price the measures were optimised for; None for mixtures.
        J (float): Time-average weighted AoS ``sum omega(r) * s * mu``.
        D (float): Time-average number of transmissions ``sum nu``.
        objective (float | None): LP objective, when the measures come from a solve.
    """

    mu: np.ndarray
    nu: np.ndarray
    omega: np.ndarray
    s_max: int
    eta: Optional[float]
    J: float
    D: float
    objective: Optional[float] = None

    @classmethod
    def from_measures(
        cls,
        mu: np.ndarray,
        nu: np.ndarray,
        omega: np.ndarray,
        eta: Optional[float],
        objective: Optional[float] = None,
    ) -> "OccupationSolution":
        J, D = _time_averages(mu, nu, omega)
        return cls(
            mu=mu,
            nu=nu,
            omega=omega,
            s_max=mu.shape[0] - 1,
            eta=eta,
            J=J,
            D=D,
            objective=objective,
        )

    @property
    def R(self) -> int:
        return int(self.mu.shape[1])

    @property
    def cap_mass(self) -> float:
        return float(self.mu[-1].sum())


@dataclass(frozen=True, eq=False)
class TransmitPolicy:
    """
    Stationary randomised transmit policy of one node.

    Attributes:
        xi (np.ndarray): (S_max+1, R) transmit probabilities; the last row is all ones.
        s_max (int): Truncation bound. States beyond it use the last row.
    """

    xi: np.ndarray
    s_max: int

    def __post_init__(self) -> None:
        xi = np.asarray(self.xi, dtype=float)
        if xi.ndim != 2 or xi.shape[0] != self.s_max + 1:
            raise ConfigurationError(
                f"xi must have shape (S_max+1, R) = ({self.s_max + 1}, R), got {xi.shape}"
            )
        if np.any(xi < 0.0) or np.any(xi > 1.0):
            raise ConfigurationError("Transmit probabilities must lie in [0, 1]")
        if np.any(xi[-1] != 1.0):
            raise ConfigurationError("Transmission must be forced at S_max")
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)

    @property
    def R(self) -> int:
        return int(self.xi.shape[1])

    def transmit_probability(self, s: int, r: int) -> float:
        return float(self.xi[min(s, self.s_max), r])


def build_lp(mdp: TruncatedMdp) -> LinearProgram:
    """
    Occupation-measure LP of the truncated MDP.

    Variable layout is ``[mu (flat), nu (flat)]``. Equality rows, in order: normalisation,
    one balance row per state (births into AoS 0, into AoS 1, then the ageing rows), and
    ``mu = nu`` at the cap for every weight state. ``nu`` at AoS 0 is pinned to zero through
    its bounds since transmitting while synchronised only adds cost.
    """
    n = mdp.n_states
    R = mdp.R
    idle, transmit = mdp.kernels
    identity = sp.identity(n, format="csr")

    normalisation = sp.hstack([sp.csr_matrix(np.ones((1, n))), sp.csr_matrix((1, n))])
    balance = sp.hstack([identity - idle.T, idle.T - transmit.T])
    cap_cols = np.arange(mdp.s_max * R, n)
    cap = sp.csr_matrix(
        (
            np.concatenate([np.ones(R), -np.ones(R)]),
            (np.tile(np.arange(R), 2), np.concatenate([cap_cols, n + cap_cols])),
        ),
        shape=(R, 2 * n),
    )
    A_eq = sp.vstack([normalisation, balance, cap], format="csr")
    b_eq = np.zeros(A_eq.shape[0])
    b_eq[0] = 1.0

    A_ub = sp.hstack([-identity, identity], format="csr")
    b_ub = np.zeros(n)

    bounds = np.zeros((2 * n, 2))
    bounds[:, 1] = np.inf
    bounds[n : n + R, 1] = 0.0

    c = np.concatenate([mdp.costs[:, IDLE], mdp.costs[:, TRANSMIT] - mdp.costs[:, IDLE]])
    return LinearProgram(c=c, A_eq=A_eq, b_eq=b_eq, bounds=bounds, A_ub=A_ub, b_ub=b_ub)


def constraint_residual(problem: LinearProgram, x: np.ndarray) -> float:
    """Largest violation of any equality, inequality or bound at ``x``."""
    residual = float(np.max(np.abs(problem.A_eq @ x - problem.b_eq), initial=0.0))
    if problem.A_ub is not None:
        residual = max(residual, float(np.max(problem.A_ub @ x - problem.b_ub, initial=0.0)))
    residual = max(residual, float(np.max(problem.bounds[:, 0] - x, initial=0.0)))
    residual = max(residual, float(np.max(x - problem.bounds[:, 1], initial=0.0)))
    return residual


def solve_lp(
    problem: LinearProgram,
    feasibility_tol: float = FEASIBILITY_TOL,
    hard_tol: float = HARD_RESIDUAL_TOL,
) -> LpResult:
    """
    Solve a linear program with the HiGHS dual simplex.

    Raises:
        SolverError: If the solver stops without an optimum or the returned point
            violates the constraints by more than ``hard_tol``.
    """
    result = linprog(
        problem.c,
        A_ub=problem.A_ub,
        b_ub=problem.b_ub,
        A_eq=problem.A_eq,
        b_eq=problem.b_eq,
        bounds=problem.bounds,
        method="highs-ds",
        options=HIGHS_OPTIONS,
    )
    if result.x is None:
        raise SolverError(f"LP solver failed: {result.message}")
    x = np.asarray(result.x, dtype=float)
    residual = constraint_residual(problem, x)
    if result.status != 0:
        raise SolverError(f"LP solver stopped early: {result.message}", residual=residual)
    if residual > hard_tol:
        raise SolverError("LP solution violates its constraints", residual=residual)
    if residual > feasibility_tol:
        logger.warning(
            "LP residual %.3e exceeds the %.1e feasibility target", residual, feasibility_tol
        )
    return LpResult(x=x, objective=float(result.fun), residual=residual)


def solve_truncated(mdp: TruncatedMdp) -> OccupationSolution:
    """Solve the LP of one truncated MDP and package the occupation measures."""
    result = solve_lp(build_lp(mdp))
    n = mdp.n_states
    mu = np.clip(result.x[:n], 0.0, None)
    nu = np.clip(result.x[n:], 0.0, None)
    nu = np.minimum(nu, mu)
    shape = (mdp.s_max + 1, mdp.R)
    solution = OccupationSolution.from_measures(
        mu.reshape(shape), nu.reshape(shape), mdp.omega, mdp.eta, objective=result.objective
    )
    logger.debug(
        "Solved LP: S_max=%d, eta=%.6g, objective=%.9g, J=%.6g, D=%.6g, cap mass=%.2e",
        mdp.s_max,
        mdp.eta,
        result.objective,
        solution.J,
        solution.D,
        solution.cap_mass,
    )
    return solution


def solve_node(
    node: NodeConfig,
    eta: float,
    s_max: Optional[int] = None,
    initial_s_max: int = INITIAL_S_MAX,
    max_s_max: int = MAX_S_MAX,
    cap_tol: float = CAP_MASS_TOL,
) -> OccupationSolution:
    """
    Optimal occupation measures of one node at price ``eta``.

    With ``s_max`` given the truncation is fixed. Otherwise the bound starts at
    ``initial_s_max`` and doubles until the steady-state mass at the cap drops below
    ``cap_tol``.

    Raises:
        TruncationError: If ``max_s_max`` is reached while the cap still carries mass.
    """
    if eta < 0:
        raise ConfigurationError(f"eta must be non-negative, got {eta}")
    if s_max is not None:
        return solve_truncated(build_kernel(node, s_max, eta))

    bound = initial_s_max
    while True:
        solution = solve_truncated(build_kernel(node, bound, eta))
        if solution.cap_mass < cap_tol:
            return solution
        if bound >= max_s_max:
            raise TruncationError(bound, solution.cap_mass)
        logger.debug(
            "Cap mass %.2e at S_max=%d for eta=%.6g, doubling", solution.cap_mass, bound, eta
        )
        bound = min(2 * bound, max_s_max)


def _time_averages(mu: np.ndarray, nu: np.ndarray, omega: np.ndarray) -> Tuple[float, float]:
    aos = np.arange(mu.shape[0])[:, None]
    return float(np.sum(omega[None, :] * aos * mu)), float(np.sum(nu))


def node_J_D(sol: OccupationSolution) -> Tuple[float, float]:
    """Time-average weighted AoS and transmission rate of a solution."""
    return _time_averages(sol.mu, sol.nu, sol.omega)


def reachable_mask(sol: OccupationSolution, tol: float = REACHABLE_TOL) -> np.ndarray:
    return sol.mu > tol


def extract_policy(sol: OccupationSolution, tol: float = REACHABLE_TOL) -> TransmitPolicy:
    """
    Transmit probabilities ``nu / mu`` on reachable states; unreachable states and the
    cap transmit with probability 1.
    """
    reachable = reachable_mask(sol, tol)
    xi = np.ones_like(sol.mu)
    np.divide(sol.nu, sol.mu, out=xi, where=reachable)
    xi = np.clip(xi, 0.0, 1.0)
    xi[-1] = 1.0
    return TransmitPolicy(xi=xi, s_max=sol.s_max)
