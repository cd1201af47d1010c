"""
task_queue.py - ordered work queue for CPU-bound sweeps and enumerations

Every work item is tracked as a Task (status, timings, error) like any queued
job; execution happens on a process pool because the work is pure arithmetic.
Results always come back in submission order so output never depends on the
number of workers. With max_workers == 1 tasks run inline, in this process.
"""

import logging
import threading
import uuid
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime
from enum import Enum
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional

logger = logging.getLogger(__name__)


class TaskStatus(Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


class Task:
    """Represents a single work item"""

    def __init__(self, task_id: str, func: Callable, args: tuple):
        self.task_id = task_id
        self.func = func
        self.args = args
        self.status = TaskStatus.PENDING
        self.error = None
        self.created_at = datetime.now()
        self.started_at = None
        self.completed_at = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "task_id": self.task_id,
            "func_name": self.func.__name__,
            "status": self.status.value,
            "error": self.error,
            "created_at": self.created_at.isoformat(),
            "started_at": self.started_at.isoformat() if self.started_at else None,
            "completed_at": self.completed_at.isoformat() if self.completed_at else None,
        }


class TaskQueue:
    """Process-pool task queue with ordered results"""

    def __init__(self, max_workers: int = 1):
        if max_workers < 1:
            raise ValueError(f"max_workers must be at least 1, got {max_workers}")
        self.max_workers = max_workers
        self.tasks: Dict[str, Task] = {}
        self.lock = threading.Lock()
        self._executor: Optional[ProcessPoolExecutor] = None
        if max_workers > 1:
            self._executor = ProcessPoolExecutor(max_workers=max_workers)

    def __enter__(self) -> "TaskQueue":
        return self

    def __exit__(self, *exc):
        self.shutdown()

    def _new_task(self, func: Callable, args: tuple) -> Task:
        task = Task(str(uuid.uuid4()), func, args)
        with self.lock:
            self.tasks[task.task_id] = task
        return task

    def _mark(self, task: Task, status: TaskStatus, error: Optional[str] = None):
        with self.lock:
            task.status = status
            if status is TaskStatus.RUNNING:
                task.started_at = datetime.now()
            elif status in (TaskStatus.COMPLETED, TaskStatus.FAILED):
                task.completed_at = datetime.now()
                task.error = error

    def map_ordered(self, func: Callable, arg_tuples: Iterable[tuple]) -> Iterator[Any]:
        """Run func(*args) for each args tuple, yielding results in submission order."""
        tasks = [self._new_task(func, tuple(args)) for args in arg_tuples]
        logger.debug(f"[Queue] {len(tasks)} tasks of {func.__name__} on {self.max_workers} worker(s)")
        if self._executor is None:
            for task in tasks:
                yield self._run_inline(task)
            return
        futures = []
        for task in tasks:
            self._mark(task, TaskStatus.RUNNING)
            futures.append(self._executor.submit(func, *task.args))
        for task, future in zip(tasks, futures):
            try:
                result = future.result()
            except Exception as e:
                self._mark(task, TaskStatus.FAILED, str(e))
                logger.error(f"[Queue] task {task.task_id} ({func.__name__}) failed: {e}")
                for other in futures:
                    other.cancel()
                raise
            self._mark(task, TaskStatus.COMPLETED)
            yield result

    def _run_inline(self, task: Task) -> Any:
        self._mark(task, TaskStatus.RUNNING)
        try:
            result = task.func(*task.args)
        except Exception as e:
            self._mark(task, TaskStatus.FAILED, str(e))
            logger.error(f"[Queue] task {task.task_id} ({task.func.__name__}) failed: {e}")
            raise
        self._mark(task, TaskStatus.COMPLETED)
        return result

    def get_task(self, task_id: str) -> Optional[Task]:
        with self.lock:
            return self.tasks.get(task_id)

    def get_all_tasks(self) -> List[Dict[str, Any]]:
        with self.lock:
            return [t.to_dict() for t in sorted(self.tasks.values(), key=lambda x: x.created_at)]

    def get_queue_status(self) -> Dict[str, Any]:
        with self.lock:
            tasks = list(self.tasks.values())
        return {
            "total_tasks": len(tasks),
            "pending": sum(t.status is TaskStatus.PENDING for t in tasks),
            "running": sum(t.status is TaskStatus.RUNNING for t in tasks),
            "completed": sum(t.status is TaskStatus.COMPLETED for t in tasks),
            "failed": sum(t.status is TaskStatus.FAILED for t in tasks),
            "workers": self.max_workers,
        }

    def shutdown(self):
        if self._executor is not None:
            logger.debug("[Queue] Shutting down workers...")
            self._executor.shutdown(wait=True, cancel_futures=True)
            self._executor = None
