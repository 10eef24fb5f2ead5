from app.services.experiment_runners.anneal_train import run_anneal_train
from app.services.experiment_runners.broken_path import run_broken_path
from app.services.experiment_runners.monotone import run_monotone
from app.services.experiment_runners.noise_mc import run_noise_mc
from app.services.experiment_runners.registry import RunnerSpec
from app.services.experiment_runners.size_bootstrap import run_size_bootstrap

RUNNERS: dict[str, RunnerSpec] = {
    "anneal-train": RunnerSpec(
        name="anneal-train",
        version="1.0.0",
        handler=run_anneal_train,
    )
}

RUNNERS["size-bootstrap"] = RunnerSpec(
    name="size-bootstrap",
    version="1.0.0",
    handler=run_size_bootstrap,
)
RUNNERS["broken-path"] = RunnerSpec(
    name="broken-path",
    version="1.0.0",
    handler=run_broken_path,
)
RUNNERS["noise-mc"] = RunnerSpec(
    name="noise-mc",
    version="1.0.0",
    handler=run_noise_mc,
)
RUNNERS["monotone"] = RunnerSpec(
    name="monotone",
    version="1.0.0",
    handler=run_monotone,
)
