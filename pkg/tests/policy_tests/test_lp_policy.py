# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

import numpy as np
import pytest
import scipy.sparse as sp

from aos_sched import (
    ConfigurationError,
    NodeConfig,
    OccupationSolution,
    SolverError,
    TransmitPolicy,
    TruncationError,
    build_kernel,
    build_lp,
    extract_policy,
    make_paper_config,
    node_J_D,
    solve_lp,
    solve_node,
)
from aos_sched.lp_policy import LinearProgram, constraint_residual, solve_truncated
from tests.policy_tests.common import random_instance, single_state_node

UNBOUNDED = np.array([[0.0, np.inf]])


def test_build_lp_dimensions():
    problem = build_lp(build_kernel(single_state_node(lam=1.0), 2, eta=0.5))
    assert problem.n_variables == 6
    assert problem.n_equalities == 5


def test_build_lp_costs():
    node = random_instance(4).node
    mdp = build_kernel(node, 3, eta=0.7)
    problem = build_lp(mdp)
    n = mdp.n_states
    for s in range(4):
        for r in range(node.R):
            assert problem.c[mdp.index(s, r)] == pytest.approx(node.omega[r] * s)
    np.testing.assert_allclose(problem.c[n:], 0.7)


def test_solve_lp_trivial():
    problem = LinearProgram(
        c=np.array([1.0]),
        A_eq=sp.csr_matrix(np.array([[1.0]])),
        b_eq=np.array([1.0]),
        bounds=UNBOUNDED,
    )
    result = solve_lp(problem)
    assert result.x[0] == pytest.approx(1.0)
    assert result.residual <= 1e-9


def test_solve_lp_infeasible():
    problem = LinearProgram(
        c=np.array([1.0]),
        A_eq=sp.csr_matrix(np.array([[1.0], [1.0]])),
        b_eq=np.array([1.0, 2.0]),
        bounds=UNBOUNDED,
    )
    with pytest.raises(SolverError):
        solve_lp(problem)


def test_constraint_residual_counts_bounds():
    problem = LinearProgram(
        c=np.array([1.0]),
        A_eq=sp.csr_matrix(np.array([[1.0]])),
        b_eq=np.array([-0.5]),
        bounds=UNBOUNDED,
    )
    assert constraint_residual(problem, np.array([-0.5])) == pytest.approx(0.5)


def test_truncated_instance_objective():
    solution = solve_truncated(build_kernel(single_state_node(lam=1.0), 3, eta=0.5))
    assert solution.objective == pytest.approx(1.5, abs=1e-8)
    assert solution.J + 0.5 * solution.D == pytest.approx(1.5, abs=1e-8)


def test_solve_node_without_arrivals():
    chain = random_instance(1).node.chain
    solution = solve_node(NodeConfig(lam=0.0, chain=chain), 1.0)
    assert solution.J == pytest.approx(0.0, abs=1e-9)
    assert solution.D == pytest.approx(0.0, abs=1e-9)
    assert solution.mu[0].sum() == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize(
    "eta, J, D",
    [(0.5, 1.0, 1.0), (2.5, 1.5, 0.5)],
    ids=["transmit-every-slot", "transmit-every-other-slot"],
)
def test_solve_node_saturated_arrivals(eta, J, D):
    solution = solve_node(single_state_node(lam=1.0), eta)
    assert solution.J == pytest.approx(J, abs=1e-8)
    assert solution.D == pytest.approx(D, abs=1e-8)
    assert node_J_D(solution) == pytest.approx((J, D), abs=1e-8)


def test_solve_node_tied_thresholds():
    # thresholds 2 and 3 both reach gain 3 at this price
    solution = solve_node(single_state_node(lam=1.0), 3.0)
    assert solution.J + 3.0 * solution.D == pytest.approx(3.0, abs=1e-8)
    assert 1.0 / 3.0 - 1e-8 <= solution.D <= 0.5 + 1e-8


def test_solve_node_grows_truncation():
    solution = solve_node(single_state_node(lam=1.0), 200.0, initial_s_max=8)
    assert solution.s_max == 32
    assert solution.cap_mass < 1e-8
    assert solution.J == pytest.approx(10.5, abs=1e-7)
    assert solution.D == pytest.approx(0.05, abs=1e-9)


def test_solve_node_truncation_ceiling():
    with pytest.raises(TruncationError) as excinfo:
        solve_node(single_state_node(lam=1.0), 1e6, initial_s_max=8, max_s_max=16)
    assert excinfo.value.s_max == 16
    assert excinfo.value.cap_mass > 1e-8


def test_solve_node_rejects_negative_price():
    with pytest.raises(ConfigurationError):
        solve_node(single_state_node(lam=0.5), -1.0)


def test_solution_is_feasible():
    instance = random_instance(17)
    solution = solve_node(instance.node, instance.eta, s_max=instance.s_max)
    assert solution.mu.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(solution.nu <= solution.mu)
    np.testing.assert_allclose(solution.nu[-1], solution.mu[-1], atol=1e-9)
    np.testing.assert_allclose(solution.nu[0], 0.0, atol=1e-12)


def test_extract_policy():
    mu = np.array([[0.6], [0.2], [0.2], [0.0]])
    nu = np.array([[0.0], [0.0], [0.2], [0.0]])
    policy = extract_policy(OccupationSolution.from_measures(mu, nu, np.ones(1), eta=1.0))
    np.testing.assert_allclose(policy.xi[:, 0], [0.0, 0.0, 1.0, 1.0])
    assert policy.transmit_probability(10, 0) == 1.0


def test_extract_policy_fractional():
    mu = np.array([[0.5], [0.4], [0.1]])
    nu = np.array([[0.0], [0.1], [0.1]])
    policy = extract_policy(OccupationSolution.from_measures(mu, nu, np.ones(1), eta=1.0))
    assert policy.xi[1, 0] == pytest.approx(0.25)


def test_time_averages():
    mu = np.array([[1.0, 0.0], [0.0, 0.0]])
    nu = np.zeros((2, 2))
    omega = np.array([1.0, 2.0])
    assert node_J_D(OccupationSolution.from_measures(mu, nu, omega, eta=None)) == (0.0, 0.0)

    mu = np.array([[0.5, 0.0], [0.25, 0.25]])
    nu = np.array([[0.0, 0.0], [0.25, 0.25]])
    J, D = node_J_D(OccupationSolution.from_measures(mu, nu, omega, eta=None))
    assert J == pytest.approx(0.75)
    assert D == pytest.approx(0.5)


@pytest.mark.parametrize(
    "xi, s_max",
    [
        (np.array([[0.0], [1.0]]), 2),
        (np.array([[0.0], [1.5], [1.0]]), 2),
        (np.zeros((2, 1)), 1),
    ],
    ids=["wrong-shape", "above-one", "cap-not-forced"],
)
def test_transmit_policy_validation(xi, s_max):
    with pytest.raises(ConfigurationError):
        TransmitPolicy(xi=xi, s_max=s_max)


MONOTONE_ETAS = np.logspace(-2, 2, 20)
REFERENCE_NODES = make_paper_config(q=0.1, N=6, T=10).nodes


@pytest.mark.parametrize(
    "node",
    [
        REFERENCE_NODES[0],
        REFERENCE_NODES[19],
        REFERENCE_NODES[39],
        random_instance(7).node,
        random_instance(11).node,
    ],
    ids=["reference-first", "reference-middle", "reference-last", "random-7", "random-11"],
)
def test_node_rate_is_non_increasing_in_price(node):
    rates = [solve_node(node, eta).D for eta in MONOTONE_ETAS]
    assert all(later <= earlier + 1e-7 for earlier, later in zip(rates, rates[1:]))
    assert rates[0] > rates[-1]
