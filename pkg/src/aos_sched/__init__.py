# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

from .config_io import (
    PolicyArtifact,
    dump_policy_artifact,
    load_policy_artifact,
    load_system_config,
)
from .errors import (
    AosError,
    BracketError,
    ConfigurationError,
    OracleError,
    SimulationError,
    SolverError,
    StationaryDistributionError,
    ThresholdViolationError,
    TruncationError,
)
from .lagrange import (
    MultiplierBracket,
    RelaxedSolution,
    bracket_multiplier,
    compute_alpha,
    lagrangian_value,
    mix_solutions,
    relaxed_policy,
    system_D,
)
from .lp_policy import (
    OccupationSolution,
    TransmitPolicy,
    build_lp,
    extract_policy,
    node_J_D,
    solve_lp,
    solve_node,
)
from .model import (
    NodeConfig,
    NodeState,
    SystemConfig,
    WeightChain,
    make_paper_config,
    stationary_weights,
    step_node,
    weighted_aos,
)
from .node_mdp import ThresholdProfile, TruncatedMdp, build_kernel, check_threshold
from .scheduler import (
    GreedyScheduler,
    NearStationaryScheduler,
    RelaxedScheduler,
    ScheduleDecision,
    Scheduler,
    greedy_schedule,
    near_stationary_schedule,
)
from .simulation import SimResult, SweepRow, run, sweep_N, sweep_q

__all__ = [
    "AosError",
    "BracketError",
    "ConfigurationError",
    "GreedyScheduler",
    "MultiplierBracket",
    "NearStationaryScheduler",
    "NodeConfig",
    "NodeState",
    "OccupationSolution",
    "OracleError",
    "PolicyArtifact",
    "RelaxedScheduler",
    "RelaxedSolution",
    "ScheduleDecision",
    "Scheduler",
    "SimResult",
    "SimulationError",
    "SolverError",
    "StationaryDistributionError",
    "SweepRow",
    "SystemConfig",
    "ThresholdProfile",
    "ThresholdViolationError",
    "TransmitPolicy",
    "TruncatedMdp",
    "TruncationError",
    "WeightChain",
    "bracket_multiplier",
    "build_kernel",
    "build_lp",
    "check_threshold",
    "compute_alpha",
    "dump_policy_artifact",
    "extract_policy",
    "greedy_schedule",
    "lagrangian_value",
    "load_policy_artifact",
    "load_system_config",
    "make_paper_config",
    "mix_solutions",
    "near_stationary_schedule",
    "node_J_D",
    "relaxed_policy",
    "run",
    "solve_lp",
    "solve_node",
    "stationary_weights",
    "step_node",
    "sweep_N",
    "sweep_q",
    "system_D",
    "weighted_aos",
]
