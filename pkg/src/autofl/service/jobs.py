"""In-process analysis job queue with polling status.

One worker thread drains the queue, so at most one checkout runs at a time
while file annotation parallelizes internally. State transitions are
monotone: queued -> running -> done | failed.
"""
from __future__ import annotations

import queue
import threading
import uuid
from dataclasses import dataclass, field
from typing import Callable


@dataclass
class JobStatus:
    job_id: str
    state: str = "queued"  # queued | running | done | failed
    files_done: int = 0
    files_total: int = 0
    error: str | None = None
    result_key: tuple[str, str, str] | None = None  # (name, sha, fingerprint)

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "state": self.state,
            "progress": {"done": self.files_done, "total": self.files_total},
            "error": self.error,
            "result": (
                {
                    "name": self.result_key[0],
                    "sha": self.result_key[1],
                    "fingerprint": self.result_key[2],
                }
                if self.result_key
                else None
            ),
        }


class DuplicateJobError(RuntimeError):
    pass


class JobQueue:
    """Single-worker queue; `run` must return the (name, sha, fingerprint) key."""

    def __init__(self) -> None:
        self._queue: queue.Queue = queue.Queue()
        self._jobs: dict[str, JobStatus] = {}
        self._inflight: set[str] = set()  # dedup keys of queued/running jobs
        self._lock = threading.Lock()
        self._worker = threading.Thread(target=self._drain, daemon=True)
        self._worker.start()

    def submit(
        self,
        dedup_key: str,
        run: Callable[[Callable[[int, int], None]], tuple[str, str, str]],
    ) -> JobStatus:
        with self._lock:
            if dedup_key in self._inflight:
                raise DuplicateJobError(f"analysis already in flight for {dedup_key}")
            status = JobStatus(job_id=uuid.uuid4().hex)
            self._jobs[status.job_id] = status
            self._inflight.add(dedup_key)
        self._queue.put((status, dedup_key, run))
        return status

    def get(self, job_id: str) -> JobStatus | None:
        with self._lock:
            return self._jobs.get(job_id)

    def _drain(self) -> None:
        while True:
            status, dedup_key, run = self._queue.get()

            def on_progress(done: int, total: int) -> None:
                status.files_done = max(status.files_done, done)
                status.files_total = total

            status.state = "running"
            try:
                status.result_key = run(on_progress)
                status.state = "done"
            except Exception as e:  # per-job isolation: a failure never kills the worker
                status.error = str(e)
                status.state = "failed"
            finally:
                with self._lock:
                    self._inflight.discard(dedup_key)
                self._queue.task_done()

    def wait_idle(self, timeout: float | None = None) -> None:
        """Block until everything queued so far has finished (tests only)."""
        with self._queue.all_tasks_done:
            if self._queue.unfinished_tasks:
                self._queue.all_tasks_done.wait(timeout)
