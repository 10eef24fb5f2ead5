from __future__ import annotations

import platform
from datetime import datetime
from typing import Any, Dict, List, Optional

import numpy as np
import pydantic
import scipy
from pydantic import BaseModel, Field

from app import __version__


def library_versions() -> Dict[str, str]:
    return {
        "qanneal-learn": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pydantic": pydantic.VERSION,
    }


class RngInfo(BaseModel):
    algorithm: str
    seed: int


class RunManifest(BaseModel):
    """
    manifest.json of one run directory. `config` is the fully resolved
    ExperimentConfig, enough to re-run without the original command line.
    """

    kind: str
    n: int
    family: Optional[str] = None
    config: Dict[str, Any]
    versions: Dict[str, str] = Field(default_factory=library_versions)
    rng: RngInfo
    noise_mode: Optional[str] = None
    started_at: datetime
    wall_time_s: float
    epochs: Optional[int] = None
    initial_rms: Optional[float] = None
    final_rms: Optional[float] = None
    # Sub-runs (size levels, path legs) relative to this directory
    children: List[str] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
