import math
from pathlib import Path

import numpy as np
import orjson
import pytest

from parity_proxy.config import (
    ExperimentConfig,
    config_from_mapping,
    dump_config,
    load_config,
    merge_overrides,
    parse_config,
    validate_config,
)
from parity_proxy.errors import ConfigError
from parity_proxy.homodyne import PRESCRIPTIONS, Prescription


def test_defaults() -> None:
    cfg = validate_config(ExperimentConfig())
    assert cfg.command == "sweep"
    assert cfg.r == 0.5
    assert cfg.steps == 200
    assert cfg.phi_grid[0] == 0.0
    assert cfg.phi_grid[-1] < 2 * math.pi


def test_phi_grid_is_half_open() -> None:
    cfg = ExperimentConfig(phi_start=0.0, phi_stop=1.0, steps=4)
    np.testing.assert_allclose(cfg.phi_grid, [0.0, 0.25, 0.5, 0.75])


def test_dump_and_parse() -> None:
    cfg = ExperimentConfig(command="montecarlo", r=0.3, steps=5, shots=1000, output="x.csv")
    raw = dump_config(cfg)
    assert orjson.loads(raw)["phi_grid"] == {"start": 0.0, "stop": 2 * math.pi, "steps": 5}
    assert parse_config(raw) == cfg


def test_nested_phi_grid() -> None:
    cfg = config_from_mapping({"phi_grid": {"start": 0.5, "steps": 10}, "r": 1})
    assert cfg.phi_start == 0.5
    assert cfg.steps == 10
    assert cfg.phi_stop == 2 * math.pi
    assert isinstance(cfg.r, float)


@pytest.mark.parametrize(
    "data",
    [
        {"gain": 0.5},
        {"phi_grid": {"begin": 0.0}},
        {"phi_grid": [0.0, 1.0]},
        {"r": "half"},
        {"steps": 2.5},
        {"steps": True},
        {"prescription": 3},
        {"output": 7},
    ],
)
def test_bad_mappings(data: dict) -> None:
    with pytest.raises(ConfigError):
        config_from_mapping(data)


def test_parse_rejects_non_objects() -> None:
    with pytest.raises(ConfigError):
        parse_config(b"[1, 2]")
    with pytest.raises(ConfigError):
        parse_config("{not json")


def test_load_config(tmp_path: Path) -> None:
    path = tmp_path / "config.json"
    path.write_bytes(orjson.dumps({"command": "sensitivity", "r": 0.8}))
    cfg = load_config(path)
    assert cfg.command == "sensitivity"
    assert cfg.r == 0.8
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


def test_flags_override_file_values() -> None:
    cfg = ExperimentConfig(r=0.8, steps=50)
    merged = merge_overrides(cfg, {"r": 0.2, "steps": None, "seed": 4})
    assert merged.r == 0.2
    assert merged.steps == 50
    assert merged.seed == 4


@pytest.mark.parametrize(
    "cfg, field",
    [
        (ExperimentConfig(command="plot"), "command"),  # type: ignore[arg-type]
        (ExperimentConfig(prescription="two"), "prescription"),  # type: ignore[arg-type]
        (ExperimentConfig(output_format="xml"), "format"),  # type: ignore[arg-type]
        (ExperimentConfig(r=-0.1), "r"),
        (ExperimentConfig(r=math.nan), "r"),
        (ExperimentConfig(steps=0), "steps"),
        (ExperimentConfig(beta_mag=-1.0), "beta_mag"),
        (ExperimentConfig(cutoff=7), "cutoff"),
        (ExperimentConfig(cutoff=121), "cutoff"),
        (ExperimentConfig(shots=0), "shots"),
        (ExperimentConfig(seed=-3), "seed"),
        (ExperimentConfig(command="sensitivity", r=0.0), "sensitivity"),
        (ExperimentConfig(command="montecarlo", beta_mag=3.5), "montecarlo"),
        (ExperimentConfig(command="sweep", beta_mag=0.0), "sweep"),
    ],
)
def test_validation_errors(cfg: ExperimentConfig, field: str) -> None:
    with pytest.raises(ConfigError, match=field):
        validate_config(cfg)


def test_validation_accepts_edge_values() -> None:
    validate_config(ExperimentConfig(cutoff=8, r=0.0, command="validate"))
    validate_config(ExperimentConfig(cutoff=120, command="montecarlo", beta_mag=3.0))
    validate_config(ExperimentConfig(command="sensitivity", beta_mag=0.0))


@pytest.mark.parametrize("prescription", PRESCRIPTIONS)
def test_every_recovery_scheme_is_configurable(prescription: Prescription) -> None:
    cfg = config_from_mapping({"prescription": prescription})
    assert validate_config(cfg).prescription == prescription
