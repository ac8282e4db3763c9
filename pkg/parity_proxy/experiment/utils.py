"""Result rows and their CSV / JSON serialization."""

import math
from collections.abc import Sequence
from typing import Any, NamedTuple, Optional, Union

import orjson

from parity_proxy import __version__
from parity_proxy.config import ExperimentConfig, config_to_mapping, dump_config

Cell = Union[float, int, bool, str]


class SweepRow(NamedTuple):
    phi: float
    S_proxy: float
    S_closed_form: float
    parity_gaussian: float
    intensity: float


class SensitivityRow(NamedTuple):
    phi: float
    delta_phi: float


class MonteCarloRow(NamedTuple):
    phi: float
    S_estimate: float
    stderr: float
    shots: int


class CheckResult(NamedTuple):
    """Outcome of one named validation check."""

    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    detail: str = ""


class ResultTable(NamedTuple):
    """Rows of one command in grid order, plus an optional summary block."""

    command: str
    columns: tuple[str, ...]
    rows: list[tuple[Cell, ...]]
    summary: dict[str, Cell]

    @property
    def failed(self) -> list[str]:
        """Names of failed checks in a validation table."""
        if "passed" not in self.columns:
            return []
        at = self.columns.index("passed")
        return [str(row[0]) for row in self.rows if not row[at]]


def format_cell(value: Cell) -> str:
    """17 significant digits for floats; NaN for undefined values."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "NaN"
        return f"{value:.17g}"
    return str(value).replace(",", ";").replace("\n", " ")


def to_csv(table: ResultTable, cfg: ExperimentConfig) -> str:
    """CSV with a ``#`` header recording the library version, config and summary.

    Nothing time-dependent is written and the output path is left out of the
    recorded config, so identical inputs give identical bytes.
    """
    lines = [
        f"# parity-proxy {__version__}",
        f"# config: {dump_config(cfg._replace(output=None)).decode()}",
    ]
    lines.extend(f"# {key}: {format_cell(value)}" for key, value in table.summary.items())
    lines.append(",".join(table.columns))
    lines.extend(",".join(format_cell(cell) for cell in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def _json_cell(value: Cell) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def to_json(table: ResultTable, cfg: ExperimentConfig) -> bytes:
    return orjson.dumps(
        {
            "version": __version__,
            "command": table.command,
            "config": config_to_mapping(cfg._replace(output=None)),
            "columns": list(table.columns),
            "rows": [[_json_cell(cell) for cell in row] for row in table.rows],
            "summary": {key: _json_cell(value) for key, value in table.summary.items()},
        },
        option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS,
    )


def rows_to_table(
    command: str,
    rows: Sequence[NamedTuple],
    columns: Sequence[str],
    summary: Optional[dict[str, Cell]] = None,
) -> ResultTable:
    return ResultTable(command, tuple(columns), [tuple(row) for row in rows], summary or {})
