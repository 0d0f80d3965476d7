# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

from __future__ import annotations

import logging
from typing import Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg
from scipy.sparse.csgraph import connected_components

from .errors import StationaryDistributionError

logger = logging.getLogger(__name__)

Kernel = Union[np.ndarray, sp.spmatrix]

# Above this size the stationary solve goes through the sparse LU.
DENSE_SOLVE_LIMIT = 2048


def closed_class_count(kernel: Kernel) -> int:
    """Number of closed (recurrent) communicating classes of a row-stochastic kernel."""
    graph = sp.csr_matrix(kernel)
    graph.eliminate_zeros()
    n_classes, labels = connected_components(graph, directed=True, connection="strong")
    coo = graph.tocoo()
    leaks = labels[coo.row] != labels[coo.col]
    open_classes = np.unique(labels[coo.row[leaks]])
    return int(n_classes - open_classes.size)


def stationary_distribution(kernel: Kernel, tol: float = 1e-10) -> np.ndarray:
    """
    Solve pi K = pi, sum(pi) = 1 for a chain with a single recurrent class.

    Transient states are allowed and receive zero mass. One balance equation is
    replaced by the normalisation row, which keeps the system non-singular
    exactly when the recurrent class is unique.

    Raises:
        StationaryDistributionError: If the chain has several closed classes or the
            residual of the solve exceeds ``tol``.
    """
    n = kernel.shape[0]
    closed = closed_class_count(kernel)
    if closed != 1:
        raise StationaryDistributionError(
            f"Chain with {n} states has {closed} closed classes; no unique stationary distribution"
        )

    rhs = np.zeros(n)
    rhs[-1] = 1.0
    if sp.issparse(kernel) and n > DENSE_SOLVE_LIMIT:
        system = (sp.csr_matrix(kernel).T - sp.identity(n, format="csr")).tolil()
        system[n - 1, :] = np.ones(n)
        pi = scipy.sparse.linalg.spsolve(system.tocsc(), rhs)
    else:
        dense = kernel.toarray() if sp.issparse(kernel) else np.asarray(kernel, dtype=float)
        system = dense.T - np.eye(n)
        system[n - 1, :] = 1.0
        pi = scipy.linalg.solve(system, rhs)

    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = float(np.max(np.abs(kernel.T @ pi - pi))) if n else 0.0
    if residual > tol:
        raise StationaryDistributionError("Stationary solve is inaccurate", residual=residual)
    logger.debug("Stationary distribution over %d states solved, residual %.2e", n, residual)
    return pi
