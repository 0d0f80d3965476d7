# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

import numpy as np
import pytest

from aos_sched import (
    ConfigurationError,
    NodeConfig,
    OracleError,
    WeightChain,
    build_kernel,
    check_threshold,
    extract_policy,
    solve_node,
    stationary_weights,
)
from aos_sched.lp_policy import reachable_mask
from aos_sched.node_mdp import policy_kernel
from aos_sched.oracle import (
    chain_stationary,
    enumerate_threshold_policies,
    rvi_average_cost,
    threshold_policy,
)
from tests.policy_tests.common import (
    ORACLE_INSTANCES,
    REACHABLE_TOL,
    random_instance,
    single_state_node,
)


def test_rvi_without_arrivals():
    mdp = build_kernel(NodeConfig(lam=0.0, chain=random_instance(0).node.chain), 5, eta=1.0)
    result = rvi_average_cost(mdp)
    assert result.gain == pytest.approx(0.0, abs=1e-9)
    np.testing.assert_array_equal(result.policy[0], 0)


@pytest.mark.parametrize("eta, gain", [(0.5, 1.5), (3.0, 3.0)])
def test_rvi_saturated_arrivals(eta, gain):
    result = rvi_average_cost(build_kernel(single_state_node(lam=1.0), 6, eta))
    assert result.gain == pytest.approx(gain, abs=1e-8)
    assert result.bias[0, 0] == 0.0


def test_rvi_iteration_cap():
    with pytest.raises(OracleError):
        rvi_average_cost(build_kernel(single_state_node(lam=0.5), 6, 1.0), max_iter=2)


def test_enumeration_saturated_arrivals():
    tau, gain = enumerate_threshold_policies(build_kernel(single_state_node(lam=1.0), 6, 0.5))
    assert tau == (1,)
    assert gain == pytest.approx(1.5, abs=1e-10)


def test_enumeration_limit():
    chain = WeightChain(P=[[0.5, 0.5], [0.5, 0.5]], omega=[1.0, 2.0])
    mdp = build_kernel(NodeConfig(lam=0.5, chain=chain), 400, 1.0)
    with pytest.raises(ConfigurationError):
        enumerate_threshold_policies(mdp)


def test_threshold_policy_shape():
    mdp = build_kernel(single_state_node(lam=0.5), 4, 1.0)
    np.testing.assert_array_equal(threshold_policy(mdp, (2,))[:, 0], [0.0, 0.0, 1.0, 1.0, 1.0])


def test_chain_stationary_absorbed_without_arrivals():
    node = random_instance(2).node
    mdp = build_kernel(NodeConfig(lam=0.0, chain=node.chain), 4, 1.0)
    xi = np.zeros((5, node.R))
    xi[-1] = 1.0
    pi = chain_stationary(policy_kernel(mdp, xi)).reshape(5, node.R)
    assert pi[0].sum() == pytest.approx(1.0)
    np.testing.assert_allclose(pi[0], stationary_weights(node.chain), atol=1e-10)


def test_chain_stationary_two_cycle():
    np.testing.assert_allclose(chain_stationary(np.array([[0.0, 1.0], [1.0, 0.0]])), [0.5, 0.5])


@pytest.mark.parametrize("index", range(ORACLE_INSTANCES))
def test_lp_matches_reference_solvers(index):
    # ---- Arrange ----
    instance = random_instance(index)
    mdp = build_kernel(instance.node, instance.s_max, instance.eta)

    # ---- Act ----
    solution = solve_node(instance.node, instance.eta, s_max=instance.s_max)
    lp_gain = solution.J + instance.eta * solution.D
    rvi = rvi_average_cost(mdp)
    _, enumerated_gain = enumerate_threshold_policies(mdp)

    # ---- Assert ----
    assert lp_gain == pytest.approx(rvi.gain, rel=1e-6)
    assert enumerated_gain == pytest.approx(rvi.gain, rel=1e-8, abs=1e-8)

    reachable = reachable_mask(solution, REACHABLE_TOL)
    profile = check_threshold(extract_policy(solution), reachable)
    assert len(profile.tau) == instance.node.R
    check_threshold(rvi.policy, reachable)

    pi = chain_stationary(policy_kernel(mdp, extract_policy(solution).xi))
    np.testing.assert_allclose(pi.reshape(solution.mu.shape), solution.mu, atol=1e-6)
