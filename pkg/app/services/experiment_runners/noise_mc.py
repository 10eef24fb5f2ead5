from __future__ import annotations

import math
from pathlib import Path
from typing import Optional

from app.db import csv_store
from app.schemas.experiment import ExperimentConfig, NoiseSpec
from app.services.experiment_runners.common import starting_schedule, target_state
from app.services.experiment_runners.registry import ChildRun, RunOutcome
from app.services.noise_service import NOISE_MODE, noise_mc
from app.services.results_service import write_training_outputs
from app.services.state_service import flat_state
from app.services.training_service import train


def _finite(x: float) -> Optional[float]:
    return x if math.isfinite(x) else None


def run_noise_mc(cfg: ExperimentConfig, out: Path) -> RunOutcome:
    """
    Robustness of a trained schedule to perturbed initial states.

    With init_policy "seed-schedule" the seed file is taken as already trained;
    otherwise the schedule is trained first and kept in trained/.
    """
    tcfg = cfg.resolved_training()
    ramp = cfg.ramp.beta_ramp()
    rho_des = target_state(cfg)
    spec = cfg.noise or NoiseSpec()
    children = []

    s = starting_schedule(cfg, tcfg, cfg.n)
    epochs = 0
    if tcfg.init_policy != "seed-schedule":
        result = train(tcfg, s, ramp, flat_state(cfg.n), rho_des)
        d = out / "trained"
        d.mkdir()
        write_training_outputs(d, result, flat_state(cfg.n), ramp)
        children.append(
            ChildRun(d.name, cfg.n, cfg.target, result.epochs_run, result.initial.rms, result.final.rms)
        )
        s = result.schedule
        epochs = result.epochs_run

    report = noise_mc(spec, s, ramp, rho_des, rng_seed=cfg.rng_seed)
    csv_store.write_noise(out, report.samples, report.summary, report.exclusions)

    return RunOutcome(
        epochs=epochs,
        initial_rms=_finite(report.baseline_rms),
        final_rms=max((x.rms for x in report.samples), default=None),
        family=cfg.target,
        noise_mode=NOISE_MODE,
        children=children,
        summary={
            "samples": len(report.samples),
            "excluded": report.excluded,
            "baseline_rms": _finite(report.baseline_rms),
            "slope": _finite(report.slope),
            "intercept": _finite(report.intercept),
        },
    )
