"""Experiment configuration: defaults, JSON files and validation.

A config file is a JSON object whose keys mirror ``ExperimentConfig`` except that
the probe-phase grid nests under ``phi_grid``::

    {"command": "sweep", "r": 0.5,
     "phi_grid": {"start": 0.0, "stop": 6.283185307179586, "steps": 200},
     "beta_mag": 1.0, "prescription": "three"}

Angles are radians. Missing keys take their defaults.
"""

import math
from pathlib import Path
from typing import Any, Literal, NamedTuple, Optional, Union

import numpy as np
import numpy.typing as npt
import orjson

from parity_proxy.errors import ConfigError
from parity_proxy.homodyne import PRESCRIPTIONS, Prescription
from parity_proxy.montecarlo import MAX_SAMPLED_BETA

Command = Literal["sweep", "sensitivity", "validate", "montecarlo"]
OutputFormat = Literal["csv", "json"]

COMMANDS: tuple[Command, ...] = ("sweep", "sensitivity", "validate", "montecarlo")
OUTPUT_FORMATS: tuple[OutputFormat, ...] = ("csv", "json")
MIN_CUTOFF = 8
MAX_CUTOFF = 120


class ExperimentConfig(NamedTuple):
    command: Command = "sweep"
    r: float = 0.5
    phi_start: float = 0.0
    phi_stop: float = 2 * math.pi
    steps: int = 200
    beta_mag: float = 1.0
    prescription: Prescription = "three"
    shots: int = 100_000
    seed: int = 0
    cutoff: int = 60
    output: Optional[str] = None
    output_format: OutputFormat = "csv"

    @property
    def phi_grid(self) -> npt.NDArray[np.float64]:
        """Half-open grid ``[phi_start, phi_stop)`` of ``steps`` points."""
        return np.linspace(self.phi_start, self.phi_stop, self.steps, endpoint=False)


_FLOAT_FIELDS = ("r", "phi_start", "phi_stop", "beta_mag")
_INT_FIELDS = ("steps", "shots", "seed", "cutoff")


def _coerce(key: str, value: Any) -> Any:
    if key in _FLOAT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        return float(value)
    if key in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return value
    if key == "output":
        if value is not None and not isinstance(value, str):
            raise ConfigError(f"output must be a path string or null, got {value!r}")
        return value
    if not isinstance(value, str):
        raise ConfigError(f"{key} must be a string, got {value!r}")
    return value


def config_from_mapping(data: dict[str, Any]) -> ExperimentConfig:
    """Build a config from a decoded JSON object; unknown keys are rejected."""
    flat = dict(data)
    grid = flat.pop("phi_grid", None)
    if grid is not None:
        if not isinstance(grid, dict):
            raise ConfigError(f"phi_grid must be an object, got {grid!r}")
        extra = set(grid) - {"start", "stop", "steps"}
        if extra:
            raise ConfigError(f"unknown phi_grid keys: {sorted(extra)}")
        for key in ("start", "stop", "steps"):
            if key in grid:
                flat[f"phi_{key}" if key != "steps" else "steps"] = grid[key]
    unknown = set(flat) - set(ExperimentConfig._fields)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**{key: _coerce(key, value) for key, value in flat.items()})


def config_to_mapping(cfg: ExperimentConfig) -> dict[str, Any]:
    data = cfg._asdict()
    data["phi_grid"] = {
        "start": data.pop("phi_start"),
        "stop": data.pop("phi_stop"),
        "steps": data.pop("steps"),
    }
    return data


def parse_config(raw: Union[bytes, str]) -> ExperimentConfig:
    try:
        data = orjson.loads(raw)
    except orjson.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return config_from_mapping(data)


def dump_config(cfg: ExperimentConfig) -> bytes:
    return orjson.dumps(config_to_mapping(cfg), option=orjson.OPT_SORT_KEYS)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(raw)


def merge_overrides(cfg: ExperimentConfig, overrides: dict[str, Any]) -> ExperimentConfig:
    """Apply flag values over ``cfg``; ``None`` means the flag was not given."""
    given = {key: value for key, value in overrides.items() if value is not None}
    return cfg._replace(**{key: _coerce(key, value) for key, value in given.items()})


def validate_config(cfg: ExperimentConfig) -> ExperimentConfig:
    """Raise ConfigError naming the offending field and its accepted range."""
    if cfg.command not in COMMANDS:
        raise ConfigError(f"command must be one of {', '.join(COMMANDS)}, got {cfg.command!r}")
    if cfg.prescription not in PRESCRIPTIONS:
        raise ConfigError(
            f"prescription must be 'three' or 'four', got {cfg.prescription!r}"
        )
    if cfg.output_format not in OUTPUT_FORMATS:
        raise ConfigError(f"format must be 'csv' or 'json', got {cfg.output_format!r}")
    for key in _FLOAT_FIELDS:
        if not math.isfinite(getattr(cfg, key)):
            raise ConfigError(f"{key} must be finite, got {getattr(cfg, key)!r}")
    if cfg.steps < 1:
        raise ConfigError(f"steps must be >= 1, got {cfg.steps}")
    if cfg.r < 0:
        raise ConfigError(f"r must be >= 0, got {cfg.r}")
    if cfg.beta_mag < 0:
        raise ConfigError(f"beta_mag must be >= 0, got {cfg.beta_mag}")
    if not MIN_CUTOFF <= cfg.cutoff <= MAX_CUTOFF:
        raise ConfigError(
            f"cutoff must lie in [{MIN_CUTOFF}, {MAX_CUTOFF}], got {cfg.cutoff}"
        )
    if cfg.shots < 1:
        raise ConfigError(f"shots must be >= 1, got {cfg.shots}")
    if cfg.seed < 0:
        raise ConfigError(f"seed must be >= 0, got {cfg.seed}")
    if cfg.command == "sensitivity" and cfg.r <= 0:
        raise ConfigError("sensitivity needs r > 0: the signal is flat at r = 0")
    if cfg.command == "montecarlo" and cfg.beta_mag > MAX_SAMPLED_BETA:
        raise ConfigError(
            f"montecarlo samples Fock distributions and needs beta_mag <= "
            f"{MAX_SAMPLED_BETA}, got {cfg.beta_mag}"
        )
    if cfg.command in ("sweep", "montecarlo") and cfg.beta_mag == 0:
        raise ConfigError(f"{cfg.command} needs beta_mag > 0 to recover <a_f^dag^2>")
    return cfg
