"""Job ledger for suites and stage runs: queued → running → succeeded | failed."""
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Callable, Optional
from uuid import UUID, uuid4

import structlog

from .core.errors import QGLabError

logger = structlog.get_logger(__name__)

# assumption recorded for failures that are not QGLabError
INTERNAL_ERROR = "internal-error"


@dataclass
class Job:
    job_type: str
    payload: dict
    id: UUID = field(default_factory=uuid4)
    status: str = "queued"
    result: Any = None
    error: Optional[str] = None
    assumption: Optional[str] = None
    created_at: datetime = field(default_factory=datetime.utcnow)
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None

    @property
    def seconds(self) -> float:
        if self.started_at is None or self.completed_at is None:
            return 0.0
        return (self.completed_at - self.started_at).total_seconds()


class JobLedger:
    def __init__(self):
        self.jobs: list[Job] = []

    def create(self, job_type: str, payload: dict | None = None) -> Job:
        job = Job(job_type=job_type, payload=payload or {})
        self.jobs.append(job)
        return job

    def set_running(self, job: Job) -> None:
        job.status = "running"
        job.started_at = datetime.utcnow()

    def set_completed(self, job: Job, result: Any = None, error: Exception | None = None) -> None:
        job.status = "succeeded" if error is None else "failed"
        job.result = result
        if error is not None:
            job.error = str(error) or type(error).__name__
            job.assumption = getattr(error, "assumption", INTERNAL_ERROR)
        job.completed_at = datetime.utcnow()

    def timings(self) -> dict[str, float]:
        return {job.job_type: job.seconds for job in self.jobs}


def run_job(ledger: JobLedger, job: Job, work: Callable[[], Any]) -> Job:
    """Run work() for a queued job. Any exception marks the job failed instead of escaping."""
    if job.status != "queued":
        return job
    ledger.set_running(job)
    log = logger.bind(job=job.job_type, job_id=str(job.id))
    log.info("job.started")
    try:
        result = work()
    except QGLabError as e:
        ledger.set_completed(job, error=e)
        log.warning("job.failed", error=job.error, assumption=job.assumption)
        return job
    except Exception as e:
        ledger.set_completed(job, error=e)
        log.exception("job.crashed", error=job.error)
        return job
    ledger.set_completed(job, result=result)
    log.info("job.succeeded", seconds=job.seconds)
    return job
