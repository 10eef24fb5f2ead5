from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from app.core.config import settings
from app.core.logging import get_logger
from app.core.qops import ComplexMatrix
from app.db import csv_store
from app.models.schedule import BetaRamp, ScheduleSet
from app.models.training import GammaResult, TrainingResult
from app.models.trajectory import Trajectory
from app.services.propagation_service import interaction_states, run_forward
from app.services.state_service import spin_averages

logger = get_logger(__name__)

REPORT_COLUMNS = ("run", "kind", "n", "family", "epochs", "initial_rms", "final_rms", "wall_time_s")


def spin_curve(results: Sequence[GammaResult]) -> List[Dict[str, float]]:
    """(gamma, qubit, mean_spin) rows for the trained endpoint at every gamma."""
    return [
        {"gamma": r.gamma, "qubit": q, "mean_spin": v}
        for r in sorted(results, key=lambda r: r.gamma)
        for q, v in enumerate(r.spins)
    ]


def step_spins(states: Dict[int, ComplexMatrix]) -> Dict[int, List[float]]:
    return {k: spin_averages(rho) for k, rho in states.items()}


def write_training_outputs(
    directory: Path,
    result: TrainingResult,
    rho0: ComplexMatrix,
    ramp: BetaRamp,
    stride: Optional[int] = None,
) -> Trajectory:
    """errors.csv, schedule.csv/json, and the sampled rho_I / spin series of the trained run."""
    csv_store.write_errors(directory, result.reports)
    csv_store.write_schedule(directory, result.schedule)
    return write_series(directory, result.schedule, rho0, ramp, stride)


def write_series(
    directory: Path,
    s: ScheduleSet,
    rho0: ComplexMatrix,
    ramp: BetaRamp,
    stride: Optional[int] = None,
) -> Trajectory:
    traj = run_forward(rho0, s, ramp)
    states = interaction_states(traj, stride or settings.SERIES_STRIDE)
    csv_store.write_rho_series(directory, states)
    csv_store.write_step_spins(directory, step_spins(states))
    return traj


def _fmt(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


def collect_manifests(root: Union[str, Path]) -> List[Dict[str, Any]]:
    """Every manifest.json under `root`, with its run directory relative to root."""
    root = Path(root)
    rows: List[Dict[str, Any]] = []
    for path in sorted(root.rglob(csv_store.MANIFEST_JSON)):
        # staging directories of interrupted runs are hidden
        if any(part.startswith(".") for part in path.relative_to(root).parts):
            continue
        doc = csv_store.read_json(path)
        run = str(path.parent.relative_to(root)) or "."
        rows.append({"run": run, **{c: doc.get(c) for c in REPORT_COLUMNS if c != "run"}})
    return rows


def render_report(rows: Sequence[Dict[str, Any]]) -> str:
    """Plain-text summary table."""
    if not rows:
        return "no runs found"
    cells = [[_fmt(r.get(c)) for c in REPORT_COLUMNS] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(REPORT_COLUMNS)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(REPORT_COLUMNS, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells)
    return "\n".join(lines)
