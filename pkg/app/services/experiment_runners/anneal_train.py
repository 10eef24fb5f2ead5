from __future__ import annotations

from pathlib import Path

from app.schemas.experiment import ExperimentConfig
from app.services.experiment_runners.common import starting_schedule, target_state
from app.services.experiment_runners.registry import RunOutcome
from app.services.results_service import write_training_outputs
from app.services.state_service import flat_state
from app.services.training_service import train


def run_anneal_train(cfg: ExperimentConfig, out: Path) -> RunOutcome:
    """flat -> target training with a fixed epoch budget."""
    tcfg = cfg.resolved_training()
    ramp = cfg.ramp.beta_ramp()
    rho0 = flat_state(cfg.n)

    result = train(tcfg, starting_schedule(cfg, tcfg, cfg.n), ramp, rho0, target_state(cfg))
    write_training_outputs(out, result, rho0, ramp)

    return RunOutcome(
        epochs=result.epochs_run,
        initial_rms=result.initial.rms,
        final_rms=result.final.rms,
        family=cfg.target,
    )
