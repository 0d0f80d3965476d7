# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

import numpy as np
import pytest

from aos_sched import NodeConfig, WeightChain

Q = 0.3
SYMMETRIC_P = np.array([[Q, 1.0 - Q], [1.0 - Q, Q]])
SKEWED_P = np.array([[0.9, 0.1], [0.5, 0.5]])
TWO_LEVELS = np.array([1.0, 10.0])


def two_state_node(lam: float = 0.5, P: np.ndarray = SYMMETRIC_P) -> NodeConfig:
    return NodeConfig(lam=lam, chain=WeightChain(P=P, omega=TWO_LEVELS))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
