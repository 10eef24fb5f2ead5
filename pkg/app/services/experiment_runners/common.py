from __future__ import annotations

from pathlib import Path

from app.core.errors import ConfigValidationError
from app.core.qops import ComplexMatrix
from app.db import csv_store
from app.models.schedule import ScheduleSet
from app.schemas.experiment import ExperimentConfig, TrainingConfig
from app.services.schedule_service import initial_schedule
from app.services.state_service import basis_state, ghz_state, w_state


def target_state(cfg: ExperimentConfig) -> ComplexMatrix:
    if cfg.target == "ghz":
        return ghz_state(cfg.n)
    if cfg.target == "w":
        return w_state(cfg.n)
    return basis_state(cfg.target)


def starting_schedule(cfg: ExperimentConfig, tcfg: TrainingConfig, n: int) -> ScheduleSet:
    """Zero couplings under the K ramp, or the seed schedule file when the policy asks for it."""
    ramp = cfg.ramp
    if tcfg.init_policy == "seed-schedule" and cfg.seed_schedule_file:
        s = csv_store.read_schedule(Path(cfg.seed_schedule_file))
        problems = []
        if s.n != n:
            problems.append(f"seed schedule is for n={s.n}, run needs n={n}")
        if s.timesteps != ramp.timesteps or abs(s.dt - ramp.dt) > 1e-12:
            problems.append(
                f"seed schedule has T={s.timesteps}, dt={s.dt}; run has T={ramp.timesteps}, dt={ramp.dt}"
            )
        if problems:
            raise ConfigValidationError([f"seed_schedule_file: {p}" for p in problems])
        s.trainable_mask = tcfg.mask()
        return s
    return initial_schedule(
        n, ramp.timesteps, ramp.dt, ramp.k0, tcfg.mask(), ramp.ramp_end_fraction
    )
