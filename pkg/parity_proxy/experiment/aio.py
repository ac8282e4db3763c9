import asyncio
import functools
import logging
from collections.abc import Sequence
from concurrent.futures import Executor
from typing import Callable, Optional, TypeVar

from parity_proxy.config import ExperimentConfig
from parity_proxy.experiment.base import VALIDATE_COLUMNS, BaseExperimentRunner
from parity_proxy.experiment.utils import ResultTable, rows_to_table
from parity_proxy.experiment.validate import CHECKS, run_check

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class AsyncExperimentRunner(BaseExperimentRunner):
    """Asyncio front end: rows are computed in ``executor`` and gathered in order.

    Must be created inside a running event loop.
    """

    lock: asyncio.Lock

    def __init__(
        self, config: ExperimentConfig, executor: Optional[Executor] = None
    ) -> None:
        super().__init__(config)

        self.executor = executor
        self.lock = asyncio.Lock()
        self.loop = asyncio.get_running_loop()

    async def _gather(self, fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
        async with self.lock:
            futures = [
                self.loop.run_in_executor(self.executor, functools.partial(fn, item))
                for item in items
            ]
            return list(await asyncio.gather(*futures))

    async def asweep(self) -> ResultTable:
        grid = [float(phi) for phi in self.config.phi_grid]
        return self._sweep_table(await self._gather(self.sweep_row, grid))

    async def asensitivity(self) -> ResultTable:
        grid = [float(phi) for phi in self.config.phi_grid]
        return self._sensitivity_table(await self._gather(self.sensitivity_row, grid))

    async def amontecarlo(self) -> ResultTable:
        return self._montecarlo_table(
            await self._gather(self.montecarlo_row, self._indexed_grid())
        )

    async def avalidate(self) -> ResultTable:
        results = await self._gather(
            lambda check: run_check(check, self.config), list(CHECKS)
        )
        return rows_to_table("validate", results, VALIDATE_COLUMNS)

    async def arun(self) -> ResultTable:
        command = self.config.command
        if command == "sweep":
            return await self.asweep()
        if command == "sensitivity":
            return await self.asensitivity()
        if command == "montecarlo":
            return await self.amontecarlo()
        if command == "validate":
            return await self.avalidate()
        raise ValueError(f"Unsupported command: {command}")
