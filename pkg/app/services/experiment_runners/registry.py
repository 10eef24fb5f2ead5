from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from app.schemas.experiment import ExperimentConfig


@dataclass
class ChildRun:
    """A nested run directory (size level, path leg, trained baseline) and its headline numbers."""

    name: str
    n: int
    family: Optional[str] = None
    epochs: Optional[int] = None
    initial_rms: Optional[float] = None
    final_rms: Optional[float] = None


@dataclass
class RunOutcome:
    epochs: Optional[int] = None
    initial_rms: Optional[float] = None
    final_rms: Optional[float] = None
    family: Optional[str] = None
    noise_mode: Optional[str] = None
    children: List[ChildRun] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)


# A runner receives: (validated config, run directory being written) and does the work
RunnerFn = Callable[[ExperimentConfig, Path], RunOutcome]


@dataclass(frozen=True)
class RunnerSpec:
    name: str
    version: str
    handler: RunnerFn
