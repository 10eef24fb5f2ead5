from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

from app.core.config import settings
from app.core.errors import AnnealError, classify_failure, safe_error_summary
from app.core.logging import get_logger
from app.core.qops import ComplexMatrix
from app.models.noise import Exclusion, NoiseSample
from app.models.schedule import BetaRamp, ScheduleSet
from app.services.adjoint_service import loss
from app.services.propagation_service import run_forward

logger = get_logger(__name__)

SampleOutcome = Union[NoiseSample, Exclusion]


@dataclass(frozen=True)
class NoiseContext:
    """Fixed inputs shared by every sample: the trained schedule, ramp and target."""

    schedule: ScheduleSet
    ramp: BetaRamp
    rho_des: ComplexMatrix


@dataclass(frozen=True)
class NoiseJob:
    index: int
    requested: float
    magnitude: float
    rho0: ComplexMatrix


# Set once per worker process by init_worker
_CONTEXT: Optional[NoiseContext] = None


def init_worker(ctx: NoiseContext) -> None:
    global _CONTEXT
    _CONTEXT = ctx


def evaluate_sample(job: NoiseJob, ctx: Optional[NoiseContext] = None) -> SampleOutcome:
    """
    Evolve one perturbed state under the fixed schedule.

    Failures do not propagate: the sample goes to the exclusion ledger with its
    failure category.
    """
    ctx = ctx or _CONTEXT
    if ctx is None:
        raise RuntimeError("noise worker used before init_worker")

    try:
        traj = run_forward(job.rho0, ctx.schedule, ctx.ramp)
        rms = loss(traj, ctx.rho_des).rms
    except AnnealError as e:
        return Exclusion(
            index=job.index,
            requested=job.requested,
            category=classify_failure(e),
            error_summary=safe_error_summary(e),
        )
    return NoiseSample(index=job.index, requested=job.requested, magnitude=job.magnitude, rms=rms)


def run_jobs(
    jobs: Sequence[NoiseJob], ctx: NoiseContext, workers: Optional[int] = None
) -> List[SampleOutcome]:
    """Evaluate every job, in-process or across a process pool; output follows job order."""
    workers = WorkerSettings.max_workers if workers is None else workers
    if workers <= 1 or len(jobs) < 2:
        outcomes = [evaluate_sample(job, ctx) for job in jobs]
    else:
        logger.info("evaluating %d noise samples on %d workers", len(jobs), workers)
        with ProcessPoolExecutor(
            max_workers=workers, initializer=init_worker, initargs=(ctx,)
        ) as pool:
            outcomes = list(pool.map(evaluate_sample, jobs, chunksize=WorkerSettings.chunksize))

    for outcome in outcomes:
        if isinstance(outcome, Exclusion):
            logger.warning(
                "noise sample %d (magnitude %.4g) excluded [%s]: %s",
                outcome.index,
                outcome.requested,
                outcome.category,
                outcome.error_summary,
            )
    return outcomes


class WorkerSettings:
    max_workers = settings.NOISE_WORKERS
    chunksize = 16
