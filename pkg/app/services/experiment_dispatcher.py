from __future__ import annotations

from pathlib import Path

from app.core.errors import AnnealError, ConfigValidationError, classify_failure, safe_error_summary
from app.core.logging import get_logger
from app.schemas.experiment import ExperimentConfig
from app.services.experiment_runners import RUNNERS
from app.services.experiment_runners.registry import RunOutcome

logger = get_logger(__name__)


def dispatch_run(cfg: ExperimentConfig, directory: Path) -> RunOutcome:
    """
    Look up the runner for cfg.kind and run it into `directory`.
    """
    spec = RUNNERS.get(cfg.kind)
    if not spec:
        raise ConfigValidationError([f"kind: unknown experiment kind {cfg.kind!r}"])

    logger.info("running %s v%s (n=%d)", spec.name, spec.version, cfg.n)
    try:
        return spec.handler(cfg, directory)
    except AnnealError as e:
        logger.error("%s failed [%s]: %s", spec.name, classify_failure(e), safe_error_summary(e))
        raise
    except Exception as e:
        # last-resort log for anything the runners did not anticipate
        logger.exception(
            "%s failed [%s]: %s", spec.name, classify_failure(e), safe_error_summary(e)
        )
        raise
