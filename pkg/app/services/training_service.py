from __future__ import annotations

import math
from typing import Callable, List, Optional

import numpy as np

from app.core.config import settings
from app.core.errors import (
    AnnealError,
    DegenerateScheduleError,
    PropagationError,
    TrainingDivergedError,
    classify_failure,
    safe_error_summary,
)
from app.core.logging import get_logger
from app.core.qops import ComplexMatrix
from app.models.schedule import BetaRamp, MonotoneSchedule, ScheduleSet
from app.models.training import GammaResult, LossReport, MonotoneResult, SizeLevel, TrainingResult
from app.models.trajectory import Trajectory
from app.schemas.experiment import TrainingConfig
from app.schemas.path import PathSpec
from app.services.adjoint_service import gradient, loss, monotone_gradient
from app.services.propagation_service import run_forward
from app.services.schedule_service import (
    DEGENERATE_TOL,
    expand_monotone,
    initial_schedule,
    seed_from_smaller,
)
from app.services.state_service import flat_state, ghz_state, path_start, path_state, spin_averages

logger = get_logger(__name__)

# Called with every LossReport as it is produced
ReportSink = Callable[[LossReport], None]

# Errors at or below this count as exact; a reached target is never updated away from
RMS_ZERO_TOL = 1e-10


def should_stop(rms: float, stop_rms: float) -> bool:
    """Early-stop test shared by both training loops; stop_rms = inf never stops."""
    if math.isinf(stop_rms):
        return False
    return rms <= max(stop_rms, RMS_ZERO_TOL)


def transform_step_scale(dt: float, beta_f: float) -> float:
    """
    Step-size factor for the last column of a free schedule.

    The last step's parameters also set the finite-temperature transform, whose
    curvature grows like beta_f**2 against dt**2 for an ordinary step. Scaling
    that column by dt**2 / (dt**2 + beta_f**2) keeps one learning rate stable
    across the whole schedule; it is 1 when beta_f = 0.
    """
    return dt * dt / (dt * dt + beta_f * beta_f)


def _forward(rho0: ComplexMatrix, s: ScheduleSet, ramp: BetaRamp, epoch: int) -> Trajectory:
    """Forward run; an overflowing transform during training counts as divergence."""
    try:
        return run_forward(rho0, s, ramp)
    except PropagationError as e:
        if classify_failure(e) == "overflow":
            raise TrainingDivergedError(epoch, str(e)) from e
        raise


def _checked_report(traj: Trajectory, rho_des: ComplexMatrix, epoch: int) -> LossReport:
    report = loss(traj, rho_des, epoch)
    if not report.is_finite():
        raise TrainingDivergedError(epoch, f"loss is {report.loss}")
    return report


def _log_epoch(report: LossReport, max_epochs: int, label: str) -> None:
    every = max(1, settings.LOG_EVERY)
    if report.epoch % every == 0 or report.epoch == max_epochs:
        logger.info(
            "%sepoch %d/%d: rms=%.6g loss=%.6g",
            label,
            report.epoch,
            max_epochs,
            report.rms,
            report.loss,
        )


def train(
    cfg: TrainingConfig,
    s0: ScheduleSet,
    ramp: BetaRamp,
    rho0: ComplexMatrix,
    rho_des: ComplexMatrix,
    on_report: Optional[ReportSink] = None,
    label: str = "",
) -> TrainingResult:
    """
    Plain gradient descent, w <- w - eta_class * dL/dw, on the trainable classes.

    Each epoch runs forward and reports, then stops if rms <= stop_rms (or the
    error is exact), otherwise updates. The last column's step is scaled by
    transform_step_scale. Epochs are numbered from 1. The returned `final`
    report evaluates the schedule that is returned.

    Raises:
        TrainingDivergedError: non-finite loss or gradient, or a transform overflow
    """
    s = s0.copy()
    mask = cfg.mask()
    s.trainable_mask = dict(mask)
    etas = cfg.etas()
    last_scale = transform_step_scale(s.dt, ramp.beta_f)
    max_epochs = cfg.epochs
    reports: List[LossReport] = []

    for epoch in range(1, max_epochs + 1):
        traj = _forward(rho0, s, ramp, epoch)
        report = _checked_report(traj, rho_des, epoch)
        reports.append(report)
        if on_report is not None:
            on_report(report)
        _log_epoch(report, max_epochs, label)

        if should_stop(report.rms, cfg.stop_rms):
            logger.info(
                "%sstopping at epoch %d: rms %.6g <= %.6g", label, epoch, report.rms, cfg.stop_rms
            )
            break

        g = gradient(traj, s, ramp, rho_des)
        if not g.is_finite():
            raise TrainingDivergedError(epoch, "gradient is not finite")
        for name, grads in g.by_class().items():
            if mask.get(name):
                step = etas[name] * grads
                step[:, -1] *= last_scale
                s.series(name)[:] -= step

    traj = _forward(rho0, s, ramp, max_epochs)
    final = _checked_report(traj, rho_des, len(reports))
    return TrainingResult(schedule=s, reports=reports, final=final, rho_i_final=traj.rho_i_final)


def train_monotone(
    cfg: TrainingConfig,
    m0: MonotoneSchedule,
    ramp: BetaRamp,
    rho0: ComplexMatrix,
    rho_des: ComplexMatrix,
    on_report: Optional[ReportSink] = None,
) -> MonotoneResult:
    """
    Gradient descent in S_w mode: the increments of S_w and the trainable final
    values are updated through the chain rule of expand_monotone. Negative
    increments are clamped to 0 after every update so S_w stays non-decreasing.
    """
    m = m0.copy()
    mask = cfg.mask()
    m.trainable_mask = dict(mask)
    etas = cfg.etas()
    eta_inc = float(cfg.eta_increment or 1e-3)
    max_epochs = cfg.epochs
    reports: List[LossReport] = []

    for epoch in range(1, max_epochs + 1):
        s = expand_monotone(m)
        traj = _forward(rho0, s, ramp, epoch)
        report = _checked_report(traj, rho_des, epoch)
        reports.append(report)
        if on_report is not None:
            on_report(report)
        _log_epoch(report, max_epochs, "S_w ")

        if should_stop(report.rms, cfg.stop_rms):
            logger.info("S_w stopping at epoch %d: rms %.6g", epoch, report.rms)
            break

        g = monotone_gradient(gradient(traj, s, ramp, rho_des), m)
        if not g.is_finite():
            raise TrainingDivergedError(epoch, "S_w gradient is not finite")

        assert g.d_increments is not None and g.d_zeta_final is not None
        assert g.d_eps_final is not None
        m.increments = np.maximum(m.increments - eta_inc * g.d_increments, 0.0)
        if mask.get("zeta"):
            m.zeta_final = m.zeta_final - etas["zeta"] * g.d_zeta_final
        if mask.get("eps"):
            m.eps_final = m.eps_final - etas["eps"] * g.d_eps_final
        if float(np.sum(m.increments)) <= DEGENERATE_TOL:
            raise DegenerateScheduleError(f"every S_w increment clamped to 0 at epoch {epoch}")

    s = expand_monotone(m)
    final = _checked_report(_forward(rho0, s, ramp, max_epochs), rho_des, len(reports))
    return MonotoneResult(monotone=m, schedule=s, reports=reports, final=final)


def bootstrap_size(
    trained: ScheduleSet,
    n: int,
    cfg: TrainingConfig,
    ramp: BetaRamp,
    k0: float,
    rho_des: Optional[ComplexMatrix] = None,
    end_fraction: Optional[float] = None,
    on_report: Optional[ReportSink] = None,
) -> TrainingResult:
    """Train n qubits towards GHZ_n, every pair seeded with the smaller system's mean coupling."""
    seed = seed_from_smaller(trained, n, k0, cfg.mask(), end_fraction)
    target = ghz_state(n) if rho_des is None else rho_des
    logger.info("size bootstrap: %d -> %d qubits", trained.n, n)
    return train(cfg, seed, ramp, flat_state(n), target, on_report=on_report, label=f"n={n} ")


def scratch_report(
    n: int,
    timesteps: int,
    dt: float,
    ramp: BetaRamp,
    k0: float,
    end_fraction: Optional[float] = None,
) -> LossReport:
    """Initial error of an untrained n-qubit flat -> GHZ run, the baseline for bootstrapping."""
    s = initial_schedule(n, timesteps, dt, k0, end_fraction=end_fraction)
    return loss(run_forward(flat_state(n), s, ramp), ghz_state(n), epoch=1)


def bootstrap_chain(
    base: ScheduleSet,
    n_to: int,
    cfg: TrainingConfig,
    ramp: BetaRamp,
    k0: float,
    end_fraction: Optional[float] = None,
) -> List[SizeLevel]:
    """Successive size bootstraps base.n + 1 .. n_to, each seeded by the previous level."""
    levels: List[SizeLevel] = []
    current = base
    for n in range(base.n + 1, n_to + 1):
        result = bootstrap_size(current, n, cfg, ramp, k0, end_fraction=end_fraction)
        baseline = scratch_report(n, base.timesteps, base.dt, ramp, k0, end_fraction)
        level = SizeLevel(n=n, result=result, scratch_initial=baseline)
        logger.info(
            "n=%d: seeded initial rms %.6g vs from-scratch %.6g, final %.6g",
            n,
            result.initial.rms,
            baseline.rms,
            result.final.rms,
        )
        levels.append(level)
        current = result.schedule
    return levels


def bootstrap_gamma(
    path: PathSpec,
    cfg: TrainingConfig,
    s0: ScheduleSet,
    ramp: BetaRamp,
    on_result: Optional[Callable[[GammaResult], None]] = None,
) -> List[GammaResult]:
    """
    Walk a broken-path leg over its gamma grid. Every gamma starts from the
    schedule trained at the previous one; the leg's initial state is fixed.
    """
    rho0 = path_start(path)
    s = s0
    results: List[GammaResult] = []
    for gamma in path.training_grid():
        target = path_state(path, gamma).density()
        try:
            result = train(cfg, s, ramp, rho0, target, label=f"gamma={gamma:g} ")
        except TrainingDivergedError as e:
            raise e.with_gamma(gamma) from e
        except AnnealError as e:
            logger.error(
                "%s leg failed at gamma=%g: %s", path.family.value, gamma, safe_error_summary(e)
            )
            raise
        assert result.rho_i_final is not None
        spins = spin_averages(result.rho_i_final)
        entry = GammaResult(gamma=gamma, result=result, spins=spins)
        logger.info(
            "%s gamma=%g: %d epochs, rms %.6g, spins %s",
            path.family.value,
            gamma,
            result.epochs_run,
            result.final.rms,
            ", ".join(f"{v:+.4f}" for v in spins),
        )
        results.append(entry)
        if on_result is not None:
            on_result(entry)
        s = result.schedule
    return results