# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

"""Exception hierarchy shared by the solvers, the simulator and the CLI."""

from __future__ import annotations

from typing import Optional


class AosError(Exception):
    """Base class for every error raised by aos_sched."""


class ConfigurationError(AosError, ValueError):
    """Invalid model parameters, config documents or command-line ranges."""


class SolverError(AosError, RuntimeError):
    """
    A numerical routine failed to produce a trustworthy answer.

    Attributes:
        residual (float | None): Largest constraint violation observed, when known.
    """

    def __init__(self, message: str, residual: Optional[float] = None) -> None:
        if residual is not None:
            message = f"{message} (residual={residual:.3e})"
        super().__init__(message)
        self.residual = residual


class TruncationError(SolverError):
    """The AoS truncation ceiling was reached while the cap still carried mass."""

    def __init__(self, s_max: int, cap_mass: float) -> None:
        super().__init__(
            f"S_max ceiling {s_max} reached with steady-state mass {cap_mass:.3e} at the cap"
        )
        self.s_max = s_max
        self.cap_mass = cap_mass


class BracketError(SolverError):
    """The Lagrange multiplier bracket could not be formed or is degenerate."""


class OracleError(SolverError):
    """A reference solver did not converge."""


class StationaryDistributionError(SolverError):
    """A Markov chain has no unique stationary distribution."""


class ThresholdViolationError(AosError):
    """
    A transmit policy is not threshold-structured.

    Attributes:
        s (int): AoS of the first state breaking the monotone pattern.
        r (int): Weight state (0-based) in which the violation was found.
    """

    def __init__(self, s: int, r: int, xi: float) -> None:
        super().__init__(
            f"Policy is not threshold-structured at state (s={s}, r={r}) with xi={xi:.6g}"
        )
        self.s = s
        self.r = r
        self.xi = xi


class SimulationError(AosError):
    """An invariant of the slotted-time simulation was broken."""
