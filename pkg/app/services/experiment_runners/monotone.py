from __future__ import annotations

from pathlib import Path

from app.db import csv_store
from app.models.schedule import MonotoneSchedule
from app.schemas.experiment import ExperimentConfig
from app.services.experiment_runners.common import target_state
from app.services.experiment_runners.registry import RunOutcome
from app.services.results_service import write_series
from app.services.state_service import flat_state
from app.services.training_service import train_monotone


def run_monotone(cfg: ExperimentConfig, out: Path) -> RunOutcome:
    """Train a single non-decreasing S_w and the final coupling values."""
    tcfg = cfg.resolved_training()
    ramp_cfg = cfg.ramp
    ramp = ramp_cfg.beta_ramp()
    rho0 = flat_state(cfg.n)

    m0 = MonotoneSchedule.uniform(
        cfg.n, ramp_cfg.timesteps, ramp_cfg.dt, k0=ramp_cfg.k0, anneal_steps=cfg.anneal_steps
    )
    m0.trainable_mask = tcfg.mask()
    result = train_monotone(tcfg, m0, ramp, rho0, target_state(cfg))

    csv_store.write_errors(out, result.reports)
    csv_store.write_schedule(out, result.schedule)
    csv_store.write_sw(out, result.monotone)
    write_series(out, result.schedule, rho0, ramp)

    return RunOutcome(
        epochs=len(result.reports),
        initial_rms=result.reports[0].rms if result.reports else result.final.rms,
        final_rms=result.final.rms,
        family=cfg.target,
        summary={
            "anneal_steps": result.monotone.anneal_steps,
            "epochs_to_0.05": result.epochs_to(0.05),
        },
    )
