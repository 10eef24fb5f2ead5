from __future__ import annotations

from pathlib import Path

from app.schemas.experiment import ExperimentConfig
from app.services.experiment_runners.common import starting_schedule
from app.services.experiment_runners.registry import ChildRun, RunOutcome
from app.services.results_service import write_training_outputs
from app.services.state_service import flat_state, ghz_state
from app.services.training_service import bootstrap_chain, train


def run_size_bootstrap(cfg: ExperimentConfig, out: Path) -> RunOutcome:
    """
    Train the smallest size from zeros (or a seed file), then bootstrap one
    qubit at a time up to cfg.n. Each level goes to its own n<k>/ directory.
    """
    tcfg = cfg.resolved_training()
    ramp = cfg.ramp
    beta_ramp = ramp.beta_ramp()
    n0 = cfg.bootstrap_from

    base = train(
        tcfg,
        starting_schedule(cfg, tcfg, n0),
        beta_ramp,
        flat_state(n0),
        ghz_state(n0),
        label=f"n={n0} ",
    )
    d = out / f"n{n0}"
    d.mkdir()
    write_training_outputs(d, base, flat_state(n0), beta_ramp)
    children = [
        ChildRun(d.name, n0, "ghz", base.epochs_run, base.initial.rms, base.final.rms)
    ]

    levels = bootstrap_chain(
        base.schedule, cfg.n, tcfg, beta_ramp, ramp.k0, end_fraction=ramp.ramp_end_fraction
    )
    chain = []
    for level in levels:
        d = out / f"n{level.n}"
        d.mkdir()
        write_training_outputs(d, level.result, flat_state(level.n), beta_ramp)
        r = level.result
        children.append(ChildRun(d.name, level.n, "ghz", r.epochs_run, r.initial.rms, r.final.rms))
        chain.append(
            {
                "n": level.n,
                "seeded_initial_rms": r.initial.rms,
                "scratch_initial_rms": level.scratch_initial.rms if level.scratch_initial else None,
                "seed_ratio": level.seed_ratio,
                "final_rms": r.final.rms,
            }
        )

    last = levels[-1].result if levels else base
    return RunOutcome(
        epochs=sum(c.epochs or 0 for c in children),
        initial_rms=base.initial.rms,
        final_rms=last.final.rms,
        family="ghz",
        children=children,
        summary={"chain": chain},
    )
