"""
Noise-robustness Monte Carlo: perturb the flat initial state, evolve it under a
fixed trained schedule, and relate the final error to the noise magnitude.
"""
from __future__ import annotations

from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.random import PCG64, Generator
from scipy.stats import linregress

from app.core.errors import RejectedSampleError
from app.core.logging import get_logger
from app.core.qops import ComplexMatrix, check_qubit_count, dagger
from app.models.noise import Exclusion, NoiseReport, NoiseSample
from app.models.schedule import BetaRamp, ScheduleSet
from app.schemas.experiment import NoiseSpec
from app.services.adjoint_service import loss
from app.services.propagation_service import run_forward
from app.services.state_service import flat_state
from app.worker import NoiseContext, NoiseJob, run_jobs

logger = get_logger(__name__)

RNG_ALGORITHM = "PCG64"
NOISE_MODE = "complex-entrywise"
MAX_RESAMPLES = 100


def make_rng(seed: int) -> Generator:
    return Generator(PCG64(seed))


def perturb_flat(n: int, magnitude: float, rng: Generator) -> Tuple[ComplexMatrix, float]:
    """
    Flat state plus an independent complex Gaussian on every entry (std
    magnitude / 2^n per real component), Hermitized and rescaled to unit trace.

    Returns the state and the recorded magnitude ||rho - flat||_F / ||flat||_F.

    Raises:
        RejectedSampleError: the Hermitized matrix has trace <= 0
    """
    n = check_qubit_count(n)
    if magnitude < 0:
        raise RejectedSampleError(f"noise magnitude must be >= 0, got {magnitude}")
    flat = flat_state(n)
    dim = flat.shape[0]
    std = magnitude / dim
    noise = rng.normal(0.0, std, (dim, dim)) + 1j * rng.normal(0.0, std, (dim, dim))

    m = flat + noise
    m = 0.5 * (m + dagger(m))
    tr = float(np.real(np.trace(m)))
    if tr <= 0:
        raise RejectedSampleError(f"perturbed state has trace {tr:.3e}")
    m = m / tr
    recorded = float(np.linalg.norm(m - flat) / np.linalg.norm(flat))
    return m, recorded


def draw_sample(n: int, magnitude: float, rng: Generator) -> Tuple[ComplexMatrix, float]:
    """perturb_flat, redrawing rejected samples."""
    for _ in range(MAX_RESAMPLES):
        try:
            return perturb_flat(n, magnitude, rng)
        except RejectedSampleError:
            logger.debug("resampling: perturbation at magnitude %.4g had trace <= 0", magnitude)
    raise RejectedSampleError(
        f"no acceptable sample in {MAX_RESAMPLES} draws at magnitude {magnitude}"
    )


def summarize(samples: List[NoiseSample]) -> List[Dict[str, float]]:
    """Per requested magnitude: count, mean recorded magnitude, max and mean rms."""
    rows: List[Dict[str, float]] = []
    for requested in sorted({s.requested for s in samples}):
        group = [s for s in samples if s.requested == requested]
        rms = np.array([s.rms for s in group])
        rows.append(
            {
                "requested": requested,
                "count": float(len(group)),
                "mean_magnitude": float(np.mean([s.magnitude for s in group])),
                "max_rms": float(rms.max()),
                "mean_rms": float(rms.mean()),
            }
        )
    return rows


def noise_mc(
    spec: NoiseSpec,
    trained: ScheduleSet,
    ramp: BetaRamp,
    rho_des: ComplexMatrix,
    rng_seed: int = 0,
    workers: Optional[int] = None,
) -> NoiseReport:
    """
    Monte Carlo over perturbed flat states under the FIXED trained schedule.

    Sample i uses magnitudes[i % len(magnitudes)]. All perturbations are drawn
    sequentially from one generator before any evolution, so results do not
    depend on the worker count. The slope is the least-squares fit of the
    per-magnitude maximum rms against the mean recorded magnitude.
    """
    rng = make_rng(rng_seed)
    jobs: List[NoiseJob] = []
    for i in range(spec.samples):
        requested = spec.magnitudes[i % len(spec.magnitudes)]
        rho0, recorded = draw_sample(trained.n, requested, rng)
        jobs.append(NoiseJob(index=i, requested=requested, magnitude=recorded, rho0=rho0))

    ctx = NoiseContext(schedule=trained, ramp=ramp, rho_des=rho_des)
    outcomes = run_jobs(jobs, ctx, workers)
    samples = sorted((o for o in outcomes if isinstance(o, NoiseSample)), key=lambda s: s.index)
    exclusions = sorted((o for o in outcomes if isinstance(o, Exclusion)), key=lambda e: e.index)

    baseline = loss(run_forward(flat_state(trained.n), trained, ramp), rho_des).rms
    report = NoiseReport(
        samples=samples, exclusions=exclusions, summary=summarize(samples), baseline_rms=baseline
    )
    if len(report.summary) >= 2:
        fit = linregress(
            [row["mean_magnitude"] for row in report.summary],
            [row["max_rms"] for row in report.summary],
        )
        report.slope = float(fit.slope)
        report.intercept = float(fit.intercept)
    logger.info(
        "noise MC: %d samples kept, %d excluded, slope %.4g (baseline rms %.6g)",
        len(samples),
        len(exclusions),
        report.slope,
        baseline,
    )
    return report
