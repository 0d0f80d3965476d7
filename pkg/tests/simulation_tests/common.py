# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

import numpy as np
import pytest

from aos_sched import NodeConfig, SystemConfig, TransmitPolicy, WeightChain

SEED = 42
S_MAX = 3


def constant_policy(p: float, s_max: int = S_MAX, R: int = 1) -> TransmitPolicy:
    """Transmit with probability ``p`` in every unsynchronised state below the cap."""
    xi = np.full((s_max + 1, R), p)
    xi[0] = 0.0
    xi[-1] = 1.0
    return TransmitPolicy(xi=xi, s_max=s_max)


def always_policy(s_max: int = S_MAX, R: int = 1) -> TransmitPolicy:
    return TransmitPolicy(xi=np.ones((s_max + 1, R)), s_max=s_max)


def two_level_node(lam: float, q: float = 0.3, scale: float = 1.0) -> NodeConfig:
    P = np.array([[q, 1.0 - q], [1.0 - q, q]])
    return NodeConfig(lam=lam, chain=WeightChain(P=P, omega=np.array([1.0, 10.0]) * scale))


def small_config(N: int = 2, T: int = 2000, seed: int = SEED) -> SystemConfig:
    lams = (0.9, 0.7, 0.5, 0.3, 0.1)
    nodes = tuple(two_level_node(lam, scale=1.0 / (i + 1)) for i, lam in enumerate(lams))
    return SystemConfig(N=N, nodes=nodes, T=T, seed=seed)


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)
