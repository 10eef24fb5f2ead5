"""
CSV and JSON codecs for run directories.

Floats are written with 17 significant digits so that every value read back
is bit-identical to the one written.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence

import numpy as np
from pydantic import BaseModel

from app.core.errors import RunStorageError
from app.core.qops import ComplexMatrix
from app.models.noise import Exclusion, NoiseSample
from app.models.schedule import PARAM_CLASSES, MonotoneSchedule, ScheduleSet
from app.models.training import LossReport

ERRORS_CSV = "errors.csv"
SCHEDULE_CSV = "schedule.csv"
SCHEDULE_JSON = "schedule.json"
RHO_SERIES_CSV = "rho_series.csv"
SPINS_CSV = "spins.csv"
SW_CSV = "sw.csv"
NOISE_SAMPLES_CSV = "noise_samples.csv"
NOISE_SUMMARY_CSV = "noise_summary.csv"
EXCLUSIONS_CSV = "exclusions.csv"
MANIFEST_JSON = "manifest.json"


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_csv(path: Path, fieldnames: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as f:
        w = csv.DictWriter(f, fieldnames=list(fieldnames), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: fmt(v) if isinstance(v, (float, np.floating)) else v for k, v in row.items()})


def read_csv(path: Path) -> List[Dict[str, str]]:
    try:
        with path.open(encoding="utf-8", newline="") as f:
            return list(csv.DictReader(f))
    except OSError as e:
        raise RunStorageError(str(path), e.strerror or str(e)) from e


def write_json(path: Path, doc: Any) -> None:
    if isinstance(doc, BaseModel):
        text = doc.model_dump_json(indent=2)
    else:
        text = json.dumps(doc, indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")


def read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise RunStorageError(str(path), e.strerror or str(e)) from e


def write_errors(directory: Path, reports: Sequence[LossReport]) -> None:
    write_csv(
        directory / ERRORS_CSV,
        ["epoch", "rms", "loss"],
        ({"epoch": r.epoch, "rms": r.rms, "loss": r.loss} for r in reports),
    )


def write_schedule(directory: Path, s: ScheduleSet) -> None:
    """schedule.csv (step,time,param_name,value) plus the schedule.json sidecar."""

    def rows() -> Iterable[Dict[str, Any]]:
        for name in PARAM_CLASSES:
            series = s.series(name)
            for label, values in zip(s.param_names(name), series):
                for k, v in enumerate(values):
                    yield {"step": k, "time": k * s.dt, "param_name": label, "value": float(v)}

    write_csv(directory / SCHEDULE_CSV, ["step", "time", "param_name", "value"], rows())
    write_json(
        directory / SCHEDULE_JSON,
        {
            "n": s.n,
            "timesteps": s.timesteps,
            "dt": s.dt,
            "pairs": [list(p) for p in s.pairs],
            "trainable_mask": s.trainable_mask,
        },
    )


def read_schedule(directory: Path) -> ScheduleSet:
    """Inverse of write_schedule; `directory` may also be the schedule.csv path."""
    directory = directory.parent if directory.suffix == ".csv" else directory
    meta = read_json(directory / SCHEDULE_JSON)
    s = ScheduleSet.zeros(int(meta["n"]), int(meta["timesteps"]), float(meta["dt"]))
    s.pairs = [(int(a), int(b)) for a, b in meta["pairs"]]
    s.trainable_mask = {k: bool(v) for k, v in meta["trainable_mask"].items()}

    index = {}
    for name in PARAM_CLASSES:
        for row, label in enumerate(s.param_names(name)):
            index[label] = (name, row)
    for rec in read_csv(directory / SCHEDULE_CSV):
        try:
            name, row = index[rec["param_name"]]
            s.series(name)[row, int(rec["step"])] = float(rec["value"])
        except (KeyError, IndexError, ValueError) as e:
            raise RunStorageError(str(directory / SCHEDULE_CSV), f"bad row {rec}: {e}") from e
    return s


def write_rho_series(directory: Path, states: Mapping[int, ComplexMatrix]) -> None:
    def rows() -> Iterable[Dict[str, Any]]:
        for k in sorted(states):
            mags = np.abs(states[k])
            for (i, j), v in np.ndenumerate(mags):
                yield {"step": k, "row": i, "col": j, "abs": float(v)}

    write_csv(directory / RHO_SERIES_CSV, ["step", "row", "col", "abs"], rows())


def write_step_spins(directory: Path, spins: Mapping[int, Sequence[float]]) -> None:
    write_csv(
        directory / SPINS_CSV,
        ["step", "qubit", "mean_spin"],
        (
            {"step": k, "qubit": q, "mean_spin": float(v)}
            for k in sorted(spins)
            for q, v in enumerate(spins[k])
        ),
    )


def write_spin_curve(directory: Path, rows: Iterable[Mapping[str, Any]]) -> None:
    write_csv(directory / SPINS_CSV, ["gamma", "qubit", "mean_spin"], rows)


def write_sw(directory: Path, m: MonotoneSchedule) -> None:
    write_csv(
        directory / SW_CSV,
        ["step", "s_w"],
        ({"step": k, "s_w": float(v)} for k, v in enumerate(m.s_w())),
    )


def write_noise(
    directory: Path,
    samples: Sequence[NoiseSample],
    summary: Sequence[Mapping[str, float]],
    exclusions: Sequence[Exclusion],
) -> None:
    write_csv(
        directory / NOISE_SAMPLES_CSV,
        ["index", "requested", "magnitude", "rms"],
        (
            {"index": s.index, "requested": float(s.requested), "magnitude": s.magnitude, "rms": s.rms}
            for s in samples
        ),
    )
    write_csv(
        directory / NOISE_SUMMARY_CSV,
        ["requested", "count", "mean_magnitude", "max_rms", "mean_rms"],
        ({**row, "count": int(row["count"])} for row in summary),
    )
    write_csv(
        directory / EXCLUSIONS_CSV,
        ["index", "requested", "category", "error_summary"],
        (
            {
                "index": e.index,
                "requested": float(e.requested),
                "category": e.category,
                "error_summary": e.error_summary or "",
            }
            for e in exclusions
        ),
    )
