# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

import json

import pytest

SMALL_CONFIG = {
    "N": 1,
    "T": 300,
    "seed": 5,
    "nodes": [
        {"lambda": 0.8, "omega": [1.0, 10.0], "P": [[0.2, 0.8], [0.8, 0.2]]},
        {"lambda": 0.5, "omega": [0.5, 5.0], "P": [[0.2, 0.8], [0.8, 0.2]]},
        {"lambda": 0.3, "omega": [2.0], "P": [[1.0]]},
    ],
}
PRESET_CONFIG = {"N": 6, "T": 100000, "seed": 0, "paper_preset": {"q": 0.1}}


def write_json(path, doc):
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


@pytest.fixture
def small_config_path(tmp_path):
    return write_json(tmp_path / "system.json", SMALL_CONFIG)


@pytest.fixture
def preset_config_path(tmp_path):
    return write_json(tmp_path / "preset.json", PRESET_CONFIG)
