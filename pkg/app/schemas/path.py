from __future__ import annotations

from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator


def default_gamma_grid() -> List[float]:
    return [round(g, 10) for g in np.linspace(0.0, 1.0, 11)]


class PathFamily(str, Enum):
    Y = "y"
    Y_PRIME = "y_prime"
    X = "x"
    X_PRIME = "x_prime"
    V = "v"
    V_PRIME = "v_prime"
    V3 = "v3"
    GHZ = "ghz"
    W = "w"
    FLAT = "flat"


# Closed-form families are defined for one qubit count only
FAMILY_QUBITS = {
    PathFamily.Y: 2,
    PathFamily.Y_PRIME: 2,
    PathFamily.V: 2,
    PathFamily.V_PRIME: 2,
    PathFamily.X: 3,
    PathFamily.X_PRIME: 3,
    PathFamily.V3: 3,
}

GAMMA_FREE = {PathFamily.GHZ, PathFamily.W, PathFamily.FLAT}


class PathSpec(BaseModel):
    """
    One leg of a broken path: a family of targets indexed by gamma.

    `start` overrides the leg's initial state with a computational basis bit
    string (e.g. "001" for the W3 second step); by default a leg starts from
    its own gamma = 0 member.
    """

    family: PathFamily
    n: int = Field(..., ge=1, le=8)
    gamma_grid: List[float] = Field(default_factory=default_gamma_grid)
    start: Optional[str] = None

    @field_validator("gamma_grid")
    @classmethod
    def validate_gamma_grid(cls, v: List[float]) -> List[float]:
        if len(v) < 2:
            raise ValueError("gamma_grid needs at least the endpoints 0 and 1")
        if v[0] != 0.0 or v[-1] != 1.0:
            raise ValueError("gamma_grid must start at 0 and end at 1")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("gamma_grid must be strictly increasing")
        return v

    @field_validator("start")
    @classmethod
    def validate_start(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and (not v or set(v) - {"0", "1"}):
            raise ValueError("start must be a bit string such as '001'")
        return v

    @model_validator(mode="after")
    def check_qubits(self) -> "PathSpec":
        need = FAMILY_QUBITS.get(self.family)
        if need is not None and self.n != need:
            raise ValueError(f"family {self.family.value} is defined for n={need}, got n={self.n}")
        if self.family in (PathFamily.GHZ, PathFamily.W) and self.n < 2:
            raise ValueError(f"family {self.family.value} needs n >= 2")
        if self.start is not None and len(self.start) != self.n:
            raise ValueError(f"start {self.start!r} does not have {self.n} bits")
        return self

    @property
    def gamma_free(self) -> bool:
        return self.family in GAMMA_FREE

    def training_grid(self) -> List[float]:
        """Gamma values a leg trains on; a gamma-free family is a single target."""
        return [1.0] if self.gamma_free else list(self.gamma_grid)
