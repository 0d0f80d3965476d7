# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

"""
JSON documents read and written by the command line: system configurations and
policy artifacts.

A system configuration is either explicit::

    {"N": 2, "T": 100000, "seed": 0,
     "nodes": [{"lambda": 0.5, "omega": [1, 10], "P": [[0.9, 0.1], [0.1, 0.9]]}, ...]}

or the reference preset ``{"N": 6, "T": 100000, "seed": 0, "paper_preset": {"q": 0.1}}``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError
from .lagrange import RelaxedSolution
from .lp_policy import OccupationSolution, TransmitPolicy, extract_policy
from .model import NodeConfig, SystemConfig, WeightChain, make_paper_config

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

CONFIG_KEYS = frozenset({"M", "N", "T", "seed", "nodes", "paper_preset"})
NODE_KEYS = frozenset({"lambda", "omega", "P"})
PRESET_KEYS = frozenset({"q", "M"})
ARTIFACT_FORMAT = "aos-sched-policy/1"
MODE_RELAXED = "relaxed"
MODE_FIXED_ETA = "fixed_eta"


def _read_json(path: PathLike) -> Any:
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise ConfigurationError(f"Cannot read {path}: {e}") from e
    except ValueError as e:
        # JSONDecodeError and UnicodeDecodeError
        raise ConfigurationError(f"{path} is not valid UTF-8 JSON: {e}") from e


def _require(doc: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in doc:
        raise ConfigurationError(f"Missing '{key}' in {where}")
    return doc[key]


def _reject_unknown(doc: Mapping[str, Any], allowed: frozenset, where: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigurationError(f"Unknown keys in {where}: {', '.join(unknown)}")


def _as_int(value: Any, key: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError, OverflowError) as e:
        raise ConfigurationError(f"'{key}' must be an integer, got {value!r}") from e


def _as_float(value: Any, key: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"'{key}' must be a number, got {value!r}") from e


def _node_from_dict(doc: Any, index: int) -> NodeConfig:
    where = f"nodes[{index}]"
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{where} must be an object")
    _reject_unknown(doc, NODE_KEYS, where)
    try:
        chain = WeightChain(
            P=np.asarray(_require(doc, "P", where), dtype=float),
            omega=np.asarray(_require(doc, "omega", where), dtype=float),
        )
        return NodeConfig(lam=float(_require(doc, "lambda", where)), chain=chain)
    except ConfigurationError as e:
        raise ConfigurationError(f"{where}: {e}") from e
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"{where} has malformed values: {e}") from e


def system_config_from_dict(doc: Any) -> SystemConfig:
    """Build a ``SystemConfig`` from a parsed configuration document."""
    if not isinstance(doc, dict):
        raise ConfigurationError("Configuration must be a JSON object")
    _reject_unknown(doc, CONFIG_KEYS, "configuration")
    has_nodes = "nodes" in doc
    has_preset = "paper_preset" in doc
    if has_nodes == has_preset:
        raise ConfigurationError("Configuration needs exactly one of 'nodes' or 'paper_preset'")

    N = _as_int(_require(doc, "N", "configuration"), "N")
    T = _as_int(_require(doc, "T", "configuration"), "T")
    seed = _as_int(doc.get("seed", 0), "seed")

    if has_preset:
        preset = doc["paper_preset"]
        if not isinstance(preset, dict):
            raise ConfigurationError("'paper_preset' must be an object")
        _reject_unknown(preset, PRESET_KEYS, "paper_preset")
        kwargs: Dict[str, Any] = {}
        q = _as_float(_require(preset, "q", "paper_preset"), "q")
        M = preset.get("M", doc.get("M"))
        if M is not None:
            kwargs["M"] = _as_int(M, "M")
        return make_paper_config(q, N, T, seed, **kwargs)

    raw_nodes = doc["nodes"]
    if not isinstance(raw_nodes, list) or not raw_nodes:
        raise ConfigurationError("'nodes' must be a non-empty list")
    nodes = tuple(_node_from_dict(node, i) for i, node in enumerate(raw_nodes))
    if "M" in doc and _as_int(doc["M"], "M") != len(nodes):
        raise ConfigurationError(f"M={doc['M']} does not match the {len(nodes)} listed nodes")
    return SystemConfig(N=N, nodes=nodes, T=T, seed=seed)


def load_system_config(path: PathLike) -> SystemConfig:
    """
    Read a JSON system configuration.

    Raises:
        ConfigurationError: If the file cannot be read or parsed, has unknown keys,
            or describes an invalid system.
    """
    config = system_config_from_dict(_read_json(path))
    logger.info(
        "Loaded configuration from %s: M=%d, N=%d, T=%d", path, config.M, config.N, config.T
    )
    return config


def system_config_to_dict(config: SystemConfig) -> Dict[str, Any]:
    return {
        "M": config.M,
        "N": config.N,
        "T": config.T,
        "seed": config.seed,
        "nodes": [
            {"lambda": node.lam, "omega": node.omega.tolist(), "P": node.P.tolist()}
            for node in config.nodes
        ],
    }


@dataclass(frozen=True, eq=False)
class PolicyArtifact:
    """
    Per-node policies together with the solve that produced them.

    Attributes:
        mode (str): ``"relaxed"`` for a bracketed mixture, ``"fixed_eta"`` for a single price.
        policies (tuple[TransmitPolicy, ...]): Transmit probabilities per node.
        solutions (tuple[OccupationSolution, ...]): Occupation measures per node.
        header (dict): eta1, eta2, alpha, J_re, D_re (relaxed) or eta, J, D (fixed price).
    """

    mode: str
    policies: Tuple[TransmitPolicy, ...]
    solutions: Tuple[OccupationSolution, ...]
    header: Dict[str, Optional[float]]


def artifact_from_relaxed(relaxed: RelaxedSolution, N: int) -> PolicyArtifact:
    return PolicyArtifact(
        mode=MODE_RELAXED,
        policies=relaxed.policies,
        solutions=relaxed.mixed,
        header={
            "N": float(N),
            "eta1": relaxed.eta1,
            "eta2": relaxed.eta2,
            "alpha": relaxed.alpha,
            "J_re": relaxed.J_re,
            "D_re": relaxed.D_re,
        },
    )


def artifact_from_fixed_eta(eta: float, solutions: Sequence[OccupationSolution]) -> PolicyArtifact:
    return PolicyArtifact(
        mode=MODE_FIXED_ETA,
        policies=tuple(extract_policy(sol) for sol in solutions),
        solutions=tuple(solutions),
        header={
            "eta": float(eta),
            "J": float(sum(sol.J for sol in solutions)),
            "D": float(sum(sol.D for sol in solutions)),
        },
    )


def dump_policy_artifact(artifact: PolicyArtifact, path: PathLike) -> None:
    """Write a policy artifact as JSON. Output bytes depend only on the artifact."""
    doc = {
        "format": ARTIFACT_FORMAT,
        "mode": artifact.mode,
        **artifact.header,
        "nodes": [
            {
                "s_max": policy.s_max,
                "xi": policy.xi.tolist(),
                "mu": sol.mu.tolist(),
                "nu": sol.nu.tolist(),
            }
            for policy, sol in zip(artifact.policies, artifact.solutions)
        ],
    }
    try:
        f = open(path, "w", encoding="utf-8", newline="\n")
    except OSError as e:
        raise ConfigurationError(f"Cannot write {path}: {e}") from e
    with f:
        json.dump(doc, f, indent=1)
        f.write("\n")
    logger.info(
        "Wrote %s policy artifact for %d nodes to %s", artifact.mode, len(artifact.policies), path
    )


def load_policy_artifact(path: PathLike, config: Optional[SystemConfig] = None) -> PolicyArtifact:
    """
    Read a policy artifact written by ``dump_policy_artifact``.

    With ``config`` given, node count and weight-state counts are checked against it.
    """
    doc = _read_json(path)
    if not isinstance(doc, dict) or doc.get("format") != ARTIFACT_FORMAT:
        raise ConfigurationError(f"{path} is not a policy artifact")
    mode = doc.get("mode")
    if mode not in (MODE_RELAXED, MODE_FIXED_ETA):
        raise ConfigurationError(f"Unknown artifact mode {mode!r}")
    raw_nodes = _require(doc, "nodes", "policy artifact")
    if not isinstance(raw_nodes, list):
        raise ConfigurationError("'nodes' of a policy artifact must be a list")
    if config is not None and len(raw_nodes) != config.M:
        raise ConfigurationError(
            f"Artifact holds {len(raw_nodes)} policies, the configuration has {config.M} nodes"
        )

    policies = []
    solutions = []
    for i, raw in enumerate(raw_nodes):
        where = f"policy artifact nodes[{i}]"
        try:
            s_max = int(_require(raw, "s_max", where))
            xi = np.asarray(_require(raw, "xi", where), dtype=float)
            policy = TransmitPolicy(xi=xi, s_max=s_max)
            mu = np.asarray(_require(raw, "mu", where), dtype=float)
            nu = np.asarray(_require(raw, "nu", where), dtype=float)
        except (TypeError, ValueError, OverflowError) as e:
            raise ConfigurationError(f"{where} is malformed: {e}") from e
        if not mu.shape == nu.shape == policy.xi.shape:
            raise ConfigurationError(
                f"{where} has mu {mu.shape}, nu {nu.shape} and xi {policy.xi.shape} shapes"
            )
        if config is not None and policy.R != config.nodes[i].R:
            raise ConfigurationError(
                f"{where} has R={policy.R}, node {i} of the configuration has R={config.nodes[i].R}"
            )
        omega = config.nodes[i].omega if config is not None else np.ones(policy.R)
        policies.append(policy)
        solutions.append(OccupationSolution.from_measures(mu, nu, omega, eta=doc.get("eta")))

    header_keys = ("N", "eta1", "eta2", "alpha", "J_re", "D_re", "eta", "J", "D")
    header = {key: doc[key] for key in header_keys if key in doc}
    return PolicyArtifact(
        mode=mode, policies=tuple(policies), solutions=tuple(solutions), header=header
    )
