"""
Grid Runner

Evaluates a function over a grid of inputs on a thread pool, tracking each
point as a task and returning results in input order.
"""

import time
from concurrent.futures import Future, ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

from tqdm import tqdm

from error_handler import error_handler
from settings import settings


class TaskStatus(Enum):
    """Grid task status enumeration."""
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class GridTask:
    """One grid point."""
    index: int
    item: Any
    status: TaskStatus = TaskStatus.PENDING
    result: Any = None
    error: Optional[BaseException] = None
    created_at: float = field(default_factory=time.time)
    started_at: Optional[float] = None
    completed_at: Optional[float] = None

    @property
    def duration(self) -> Optional[float]:
        """Calculate task duration if finished."""
        if self.started_at and self.completed_at:
            return self.completed_at - self.started_at
        return None

    @property
    def is_active(self) -> bool:
        return self.status in [TaskStatus.PENDING, TaskStatus.RUNNING]


class GridRunner:
    """Thread-pool map with deterministic output ordering."""

    def __init__(self, workers: Optional[int] = None, progress: bool = False, label: str = "grid"):
        self.workers = max(1, int(settings.get("workers") if workers is None else workers))
        self.progress = progress
        self.label = label
        self.tasks: List[GridTask] = []

    def _execute(self, task: GridTask, func: Callable[[Any], Any]) -> Any:
        task.status = TaskStatus.RUNNING
        task.started_at = time.time()
        try:
            task.result = func(task.item)
            task.status = TaskStatus.COMPLETED
            return task.result
        except Exception as e:
            task.status = TaskStatus.FAILED
            task.error = e
            error_handler.handle_error(e, f"{self.label}[{task.index}]")
            return None
        finally:
            task.completed_at = time.time()

    def run(self, func: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
        """
        Evaluate func on every item.

        Results come back in input order whatever the worker count. When a
        task fails, the first failure (in input order) is re-raised once the
        pool has drained.
        """
        self.tasks = [GridTask(i, item) for i, item in enumerate(items)]
        bar = tqdm(total=len(self.tasks), desc=self.label, disable=not self.progress, leave=False)
        try:
            if self.workers == 1 or len(self.tasks) <= 1:
                for task in self.tasks:
                    self._execute(task, func)
                    bar.update(1)
            else:
                with ThreadPoolExecutor(max_workers=self.workers) as executor:
                    futures: Dict[Future, GridTask] = {
                        executor.submit(self._execute, task, func): task for task in self.tasks
                    }
                    for _ in as_completed(futures):
                        bar.update(1)
        finally:
            bar.close()

        failed = [t for t in self.tasks if t.status == TaskStatus.FAILED]
        if failed:
            raise failed[0].error
        error_handler.log_debug(
            f"{len(self.tasks)} tasks on {self.workers} workers in {self.elapsed():.3f}s", self.label
        )
        return [t.result for t in self.tasks]

    def elapsed(self) -> float:
        started = [t.started_at for t in self.tasks if t.started_at]
        finished = [t.completed_at for t in self.tasks if t.completed_at]
        if not started or not finished:
            return 0.0
        return max(finished) - min(started)

    def summary(self) -> Dict[str, int]:
        """Count tasks per status."""
        counts = {status.value: 0 for status in TaskStatus}
        for task in self.tasks:
            counts[task.status.value] += 1
        return counts


def run_grid(func: Callable[[Any], Any], items: Sequence[Any], workers: Optional[int] = None,
             progress: bool = False, label: str = "grid") -> List[Any]:
    """Convenience wrapper around GridRunner.run."""
    return GridRunner(workers, progress, label).run(func, items)
