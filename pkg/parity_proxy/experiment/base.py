import logging
import math

import numpy as np

from parity_proxy.config import ExperimentConfig
from parity_proxy.errors import UndefinedSensitivityError
from parity_proxy.experiment.utils import (
    Cell,
    MonteCarloRow,
    ResultTable,
    SensitivityRow,
    SweepRow,
    rows_to_table,
)
from parity_proxy.homodyne import (
    mean_photon_number,
    minimum_detectable_phase,
    phase_sensitivity,
    proxy_reading,
    signal_closed_form,
)
from parity_proxy.montecarlo import ShotPlan, run_proxy_experiment

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = SweepRow._fields
SENSITIVITY_COLUMNS = SensitivityRow._fields
MONTECARLO_COLUMNS = MonteCarloRow._fields
VALIDATE_COLUMNS = ("name", "passed", "max_deviation", "tolerance", "detail")

# a grid point this close to a multiple of pi counts as sampling the minimum
MINIMUM_WINDOW = 1e-2


def row_seed(seed: int, index: int) -> int:
    """Independent per-grid-point seed derived from the master seed."""
    state = np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)
    return int(state[0])


def near_multiple_of_pi(phi: float, window: float = MINIMUM_WINDOW) -> bool:
    offset = math.remainder(phi, math.pi)
    return abs(offset) <= window


class BaseExperimentRunner:
    """Per-row computations and table assembly shared by the sync and async runners."""

    def __init__(self, config: ExperimentConfig) -> None:
        self.config = config

    @property
    def n_bar(self) -> float:
        return mean_photon_number(self.config.r)

    def sweep_row(self, phi: float) -> SweepRow:
        cfg = self.config
        reading = proxy_reading(
            phi, cfg.r, beta_mag=cfg.beta_mag, prescription=cfg.prescription
        )
        return SweepRow(
            float(phi),
            reading.signal,
            signal_closed_form(self.n_bar, phi),
            reading.parity,
            reading.intensity,
        )

    def sensitivity_row(self, phi: float) -> SensitivityRow:
        try:
            estimate = phase_sensitivity(self.config.r, phi)
        except UndefinedSensitivityError as exc:
            logger.warning("skipping phi=%.17g: %s", phi, exc)
            return SensitivityRow(float(phi), math.nan)
        return SensitivityRow(float(phi), estimate.delta_phi)

    def montecarlo_row(self, indexed_phi: tuple[int, float]) -> MonteCarloRow:
        index, phi = indexed_phi
        cfg = self.config
        plan = ShotPlan.for_prescription(
            cfg.prescription, cfg.beta_mag, cfg.shots, row_seed(cfg.seed, index)
        )
        result = run_proxy_experiment(plan, phi, cfg.r, cutoff=cfg.cutoff)
        return MonteCarloRow(
            float(phi), result.parity.mean, result.parity.stderr, result.parity.shots
        )

    def _sweep_table(self, rows: list[SweepRow]) -> ResultTable:
        return rows_to_table("sweep", rows, SWEEP_COLUMNS)

    def _sensitivity_table(self, rows: list[SensitivityRow]) -> ResultTable:
        defined = [row.delta_phi for row in rows if not math.isnan(row.delta_phi)]
        at_minimum = any(near_multiple_of_pi(row.phi) for row in rows)
        if not at_minimum:
            logger.warning(
                "no grid point lies within %.0e of a multiple of pi; "
                "delta_phi_min is not the minimum detectable phase",
                MINIMUM_WINDOW,
            )
        summary: dict[str, Cell] = {
            "delta_phi_min": min(defined) if defined else math.nan,
            "minimum_detectable_phase": minimum_detectable_phase(self.n_bar),
            "heisenberg_limit": 1 / self.n_bar,
            "at_minimum": at_minimum,
        }
        return rows_to_table("sensitivity", rows, SENSITIVITY_COLUMNS, summary)

    def _montecarlo_table(self, rows: list[MonteCarloRow]) -> ResultTable:
        invalid = sum(1 for row in rows if math.isnan(row.S_estimate))
        summary = {"invalid_rows": invalid} if invalid else None
        return rows_to_table("montecarlo", rows, MONTECARLO_COLUMNS, summary)

    def _indexed_grid(self) -> list[tuple[int, float]]:
        return list(enumerate(float(phi) for phi in self.config.phi_grid))
