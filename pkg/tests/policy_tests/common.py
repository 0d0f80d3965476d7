# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

from dataclasses import dataclass

import numpy as np
import pytest

from aos_sched import NodeConfig, WeightChain, make_paper_config, relaxed_policy

ORACLE_INSTANCES = 50
ORACLE_SEED = 20240
REFERENCE_Q = 0.1
REFERENCE_N = 6
REACHABLE_TOL = 1e-8


def single_state_node(lam: float, omega: float = 1.0) -> NodeConfig:
    return NodeConfig(lam=lam, chain=WeightChain(P=[[1.0]], omega=[omega]))


@dataclass(frozen=True)
class OracleInstance:
    node: NodeConfig
    eta: float
    s_max: int


def random_instance(index: int) -> OracleInstance:
    """Small node for cross-checking the LP against the reference solvers."""
    rng = np.random.default_rng(ORACLE_SEED + index)
    R = int(rng.integers(1, 4))
    P = rng.uniform(0.2, 1.0, size=(R, R))
    P /= P.sum(axis=1, keepdims=True)
    omega = np.sort(rng.uniform(0.5, 5.0, size=R))
    lam = float(rng.uniform(0.1, 0.9))
    eta = float(rng.uniform(0.1, 10.0))
    s_max = int(rng.integers(4, 9 if R == 3 else 16))
    return OracleInstance(
        node=NodeConfig(lam=lam, chain=WeightChain(P=P, omega=omega)), eta=eta, s_max=s_max
    )


def small_system(lams=(0.9, 0.6, 0.4, 0.2)):
    P = np.array([[0.2, 0.8], [0.8, 0.2]])
    return [
        NodeConfig(lam=lam, chain=WeightChain(P=P, omega=np.array([1.0, 10.0]) / (i + 1)))
        for i, lam in enumerate(lams)
    ]


@pytest.fixture(scope="module")
def reference_config():
    return make_paper_config(q=REFERENCE_Q, N=REFERENCE_N, T=100000)


@pytest.fixture(scope="module")
def reference_relaxed(reference_config):
    return relaxed_policy(reference_config.nodes, reference_config.N)
