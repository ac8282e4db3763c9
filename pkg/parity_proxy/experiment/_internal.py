"""Worker-pool helpers shared by the experiment runners."""

from collections.abc import Iterable, Iterator
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import contextmanager
from typing import Callable, Optional, TypeVar, Union

T = TypeVar("T")
R = TypeVar("R")

Workers = Union[Executor, int, None]


@contextmanager
def get_executor(workers: Workers) -> Iterator[Optional[Executor]]:
    """Yield an executor for ``workers``.

    A ready executor is used as is and left running; an integer opens a thread
    pool of that size that is shut down on exit; ``None`` means run serially.
    """
    if workers is None:
        yield None
    elif isinstance(workers, Executor):
        yield workers
    elif isinstance(workers, int) and not isinstance(workers, bool):
        if workers < 1:
            raise ValueError(f"worker count must be >= 1, got {workers}")
        with ThreadPoolExecutor(max_workers=workers) as pool:
            yield pool
    else:
        raise TypeError(f"Invalid worker type: {type(workers)}")


def map_ordered(
    executor: Optional[Executor], fn: Callable[[T], R], items: Iterable[T]
) -> list[R]:
    """Apply ``fn`` over ``items``; results keep input order either way."""
    if executor is None:
        return [fn(item) for item in items]
    return list(executor.map(fn, items))
