# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

from .errors import ConfigurationError

logger = logging.getLogger(__name__)

THREADS_ENV = "AOS_THREADS"

T = TypeVar("T")
U = TypeVar("U")


def max_workers() -> int:
    """Worker cap from ``AOS_THREADS``, defaulting to the CPU count."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return max(1, os.cpu_count() or 1)
    try:
        workers = int(raw)
    except ValueError as e:
        raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from e
    if workers < 1:
        raise ConfigurationError(f"{THREADS_ENV} must be at least 1, got {workers}")
    return workers


def ordered_map(fn: Callable[[T], U], items: Sequence[T]) -> List[U]:
    """
    Apply ``fn`` to every item, possibly on a thread pool, returning results in input order.

    Results never depend on the schedule because each call owns its inputs.
    """
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
