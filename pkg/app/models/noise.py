from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional


@dataclass(frozen=True)
class NoiseSample:
    index: int
    requested: float
    magnitude: float
    rms: float


@dataclass(frozen=True)
class Exclusion:
    index: int
    requested: float
    category: str
    error_summary: Optional[str]


@dataclass
class NoiseReport:
    """
    Noise Monte Carlo outcome. `magnitude` on each sample is the Frobenius norm of
    the applied perturbation relative to the flat matrix's Frobenius norm.
    """

    samples: List[NoiseSample]
    exclusions: List[Exclusion] = field(default_factory=list)
    baseline_rms: float = float("nan")
    slope: float = float("nan")
    intercept: float = float("nan")
    summary: List[Dict[str, float]] = field(default_factory=list)

    @property
    def excluded(self) -> int:
        return len(self.exclusions)
