import logging
import threading
from collections.abc import Iterator
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import contextmanager
from typing import Optional

from typing_extensions import Self

from parity_proxy.config import ExperimentConfig
from parity_proxy.experiment import _internal
from parity_proxy.experiment.base import VALIDATE_COLUMNS, BaseExperimentRunner
from parity_proxy.experiment.utils import ResultTable, rows_to_table
from parity_proxy.experiment.validate import run_checks

logger = logging.getLogger(__name__)

Workers = _internal.Workers


class ExperimentRunner(BaseExperimentRunner):
    """Run experiment commands, dispatching grid points to a worker pool.

    Rows always come back in grid order. One runner executes one command at a
    time; concurrent calls on the same runner queue behind its lock.
    """

    lock: threading.Lock

    def __init__(self, config: ExperimentConfig, workers: Workers = None) -> None:
        super().__init__(config)

        self.workers = workers
        self.lock = threading.Lock()

    @classmethod
    @contextmanager
    def from_workers(
        cls, config: ExperimentConfig, workers: int
    ) -> Iterator[Self]:
        """Create a runner that owns a thread pool of ``workers`` threads.

        Example:
            with ExperimentRunner.from_workers(cfg, 4) as runner:
                table = runner.sweep()
        """
        with ThreadPoolExecutor(max_workers=workers) as pool:
            yield cls(config, pool)

    @contextmanager
    def _executor(self) -> Iterator[Optional[Executor]]:
        with self.lock, _internal.get_executor(self.workers) as executor:
            yield executor

    def sweep(self) -> ResultTable:
        """Proxy signal, closed form, Gaussian parity and intensity per grid point."""
        logger.info("sweep: r=%s over %d points", self.config.r, self.config.steps)
        with self._executor() as executor:
            rows = _internal.map_ordered(
                executor, self.sweep_row, [float(phi) for phi in self.config.phi_grid]
            )
        return self._sweep_table(rows)

    def sensitivity(self) -> ResultTable:
        logger.info("sensitivity: r=%s over %d points", self.config.r, self.config.steps)
        with self._executor() as executor:
            rows = _internal.map_ordered(
                executor, self.sensitivity_row, [float(phi) for phi in self.config.phi_grid]
            )
        return self._sensitivity_table(rows)

    def montecarlo(self) -> ResultTable:
        logger.info(
            "montecarlo: r=%s, %d shots per setting, seed %d",
            self.config.r,
            self.config.shots,
            self.config.seed,
        )
        with self._executor() as executor:
            rows = _internal.map_ordered(executor, self.montecarlo_row, self._indexed_grid())
        return self._montecarlo_table(rows)

    def validate(self) -> ResultTable:
        logger.info("validate: r=%s, cutoff=%d", self.config.r, self.config.cutoff)
        with self.lock:
            results = run_checks(self.config)
        return rows_to_table("validate", results, VALIDATE_COLUMNS)

    def run(self) -> ResultTable:
        """Run the command named in the config."""
        command = self.config.command
        if command == "sweep":
            return self.sweep()
        if command == "sensitivity":
            return self.sensitivity()
        if command == "montecarlo":
            return self.montecarlo()
        if command == "validate":
            return self.validate()
        raise ValueError(f"Unsupported command: {command}")


__all__ = ["ExperimentRunner", "BaseExperimentRunner"]
