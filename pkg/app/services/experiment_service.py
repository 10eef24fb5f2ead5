"""
Experiment lifecycle: load and validate a config, run it into an atomic run
directory, and write the manifest that makes the run reproducible.
"""
from __future__ import annotations

import json
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from app.core.config import settings
from app.core.errors import ConfigValidationError, RunStorageError
from app.core.logging import get_logger
from app.db import csv_store
from app.db.session import run_session
from app.schemas.experiment import ExperimentConfig, validate_experiment
from app.schemas.manifest import RngInfo, RunManifest
from app.services.experiment_dispatcher import dispatch_run
from app.services.experiment_runners.registry import RunOutcome
from app.services.noise_service import RNG_ALGORITHM

logger = get_logger(__name__)


def apply_overrides(doc: Dict[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """Set dotted keys ("training.max_epochs") on a raw config document; None values are skipped."""
    for key, value in overrides.items():
        if value is None:
            continue
        node = doc
        *parents, leaf = key.split(".")
        for p in parents:
            child = node.get(p)
            if child is None:
                child = node[p] = {}
            if not isinstance(child, dict):
                raise ConfigValidationError([f"{key}: {p} is not an object"])
            node = child
        node[leaf] = value
    return doc


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    defaults: Optional[Mapping[str, Any]] = None,
) -> ExperimentConfig:
    """
    Read a JSON experiment document, apply overrides and validate.

    `defaults` fill keys the file leaves out (the CLI verb supplies `kind`).

    Raises:
        ConfigValidationError: bad JSON or any schema violation
        RunStorageError: the file cannot be read
    """
    doc: Dict[str, Any] = {}
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as e:
            raise RunStorageError(str(p), e.strerror or str(e)) from e
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigValidationError([f"{p}: invalid JSON at line {e.lineno}: {e.msg}"]) from e
        if not isinstance(doc, dict):
            raise ConfigValidationError([f"{p}: top level must be an object"])
    for key, value in (defaults or {}).items():
        doc.setdefault(key, value)
    apply_overrides(doc, overrides or {})
    return validate_experiment(doc)


def default_output_dir(cfg: ExperimentConfig, started_at: datetime) -> Path:
    return Path(settings.OUTPUT_DIR) / f"{cfg.kind}-n{cfg.n}-{started_at:%Y%m%d-%H%M%S}"


def _manifest(
    cfg: ExperimentConfig, outcome: RunOutcome, started_at: datetime, wall_time_s: float
) -> RunManifest:
    # manifest carries the preset-resolved training values so the run can be repeated
    training = cfg.resolved_training().model_dump(mode="json")
    return RunManifest(
        kind=cfg.kind,
        n=cfg.n,
        family=outcome.family,
        config={**cfg.model_dump(mode="json"), "training": training},
        rng=RngInfo(algorithm=RNG_ALGORITHM, seed=cfg.rng_seed),
        noise_mode=outcome.noise_mode,
        started_at=started_at,
        wall_time_s=wall_time_s,
        epochs=outcome.epochs,
        initial_rms=outcome.initial_rms,
        final_rms=outcome.final_rms,
        children=[c.name for c in outcome.children],
        summary=outcome.summary,
    )


def run_experiment(cfg: ExperimentConfig) -> Tuple[RunManifest, Path]:
    """
    Run `cfg` into cfg.output_dir. Nothing is left at the target unless the
    whole run, manifests included, succeeds.
    """
    started_at = datetime.now(timezone.utc)
    if cfg.output_dir is None:
        cfg = cfg.model_copy(update={"output_dir": str(default_output_dir(cfg, started_at))})
    assert cfg.output_dir is not None
    t0 = time.perf_counter()
    with run_session(cfg.output_dir) as session:
        outcome = dispatch_run(cfg, session.path)
        wall = time.perf_counter() - t0
        manifest = _manifest(cfg, outcome, started_at, wall)
        for child in outcome.children:
            child_manifest = manifest.model_copy(
                update={
                    "n": child.n,
                    "family": child.family,
                    "epochs": child.epochs,
                    "initial_rms": child.initial_rms,
                    "final_rms": child.final_rms,
                    "children": [],
                    "summary": {"parent": session.target.name},
                }
            )
            child_path = session.path / child.name / csv_store.MANIFEST_JSON
            csv_store.write_json(child_path, child_manifest)
        csv_store.write_json(session.path / csv_store.MANIFEST_JSON, manifest)
    logger.info(
        "%s finished in %.1fs: rms %s -> %s",
        cfg.kind,
        wall,
        "-" if manifest.initial_rms is None else f"{manifest.initial_rms:.6g}",
        "-" if manifest.final_rms is None else f"{manifest.final_rms:.6g}",
    )
    return manifest, session.target
