from __future__ import annotations

from pathlib import Path

from app.core.logging import get_logger
from app.db import csv_store
from app.models.training import GammaResult
from app.schemas.experiment import ExperimentConfig
from app.services.experiment_runners.common import starting_schedule
from app.services.experiment_runners.registry import ChildRun, RunOutcome
from app.services.results_service import spin_curve
from app.services.training_service import bootstrap_gamma

logger = get_logger(__name__)


def gamma_dir_name(gamma: float) -> str:
    return f"gamma-{float(gamma)!r}"


def run_broken_path(cfg: ExperimentConfig, out: Path) -> RunOutcome:
    """
    Walk every leg of a broken path. Leg i is written to leg<i>-<family>/ with
    its spin curve in spins.csv and one gamma-<value>/ directory per grid point.
    A leg starts from the schedule the previous leg ended with.
    """
    assert cfg.path is not None
    tcfg = cfg.resolved_training()
    ramp = cfg.ramp.beta_ramp()
    legs = [cfg.path, *cfg.next_legs]

    s = starting_schedule(cfg, tcfg, cfg.n)
    children = []
    curves = {}
    first_rms = None
    last_rms = None
    total_epochs = 0

    for i, leg in enumerate(legs, start=1):
        leg_dir = out / f"leg{i}-{leg.family.value}"
        leg_dir.mkdir()

        def write_point(entry: GammaResult) -> None:
            d = leg_dir / gamma_dir_name(entry.gamma)
            d.mkdir()
            csv_store.write_errors(d, entry.result.reports)
            csv_store.write_schedule(d, entry.result.schedule)

        logger.info("leg %d/%d: %s over %d gamma points", i, len(legs), leg.family.value,
                    len(leg.training_grid()))
        results = bootstrap_gamma(leg, tcfg, s, ramp, on_result=write_point)
        csv_store.write_spin_curve(leg_dir, spin_curve(results))

        epochs = sum(r.result.epochs_run for r in results)
        total_epochs += epochs
        if first_rms is None:
            first_rms = results[0].result.initial.rms
        last_rms = results[-1].result.final.rms
        children.append(
            ChildRun(
                name=leg_dir.name,
                n=leg.n,
                family=leg.family.value,
                epochs=epochs,
                initial_rms=results[0].result.initial.rms,
                final_rms=last_rms,
            )
        )
        curves[leg_dir.name] = {
            "gamma": [r.gamma for r in results],
            "final_rms": [r.result.final.rms for r in results],
        }
        s = results[-1].result.schedule

    return RunOutcome(
        epochs=total_epochs,
        initial_rms=first_rms,
        final_rms=last_rms,
        family=cfg.path.family.value,
        children=children,
        summary={"legs": curves},
    )
