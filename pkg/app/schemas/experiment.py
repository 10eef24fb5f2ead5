from __future__ import annotations

import re
from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.core.config import settings
from app.core.errors import ConfigValidationError
from app.core.presets import DEFAULT_PRESET, KIND_PRESETS, TRAINING_PRESETS
from app.models.schedule import BetaRamp
from app.schemas.path import PathSpec

ExperimentKind = Literal["anneal-train", "size-bootstrap", "broken-path", "noise-mc", "monotone"]

TARGET_PATTERN = re.compile(r"^(ghz|w|[01]+)$")


def default_magnitudes() -> List[float]:
    return [round(m, 10) for m in np.linspace(0.02, 0.2, 10)]


class TrainableFlags(BaseModel):
    model_config = ConfigDict(extra="forbid")

    zeta: bool = True
    eps: bool = False
    kk: bool = False

    def as_mask(self) -> Dict[str, bool]:
        return {"zeta": self.zeta, "eps": self.eps, "kk": self.kk}


class TrainingConfig(BaseModel):
    """
    Gradient-descent hyperparameters. Unset fields are filled from a named
    preset (see app.core.presets) and then from settings.
    """

    model_config = ConfigDict(extra="forbid")

    # Learning rate per parameter class
    eta_zeta: Optional[float] = Field(default=None, gt=0)
    eta_eps: Optional[float] = Field(default=None, gt=0)
    eta_kk: Optional[float] = Field(default=None, gt=0)
    # S_w mode only: rate for the increments of the annealing parameter
    eta_increment: Optional[float] = Field(default=None, gt=0)

    max_epochs: Optional[int] = Field(default=None, ge=1)

    # Stop once rms <= stop_rms; errors below 1e-10 always stop, inf never stops
    stop_rms: float = Field(default=0.0, ge=0)

    init_policy: Literal["zeros", "seed-schedule"] = "zeros"
    trainable: Optional[TrainableFlags] = None

    def resolved(self, preset: Optional[str] = None) -> "TrainingConfig":
        """Copy with every unset field taken from `preset`, then settings."""
        values = TRAINING_PRESETS[preset or DEFAULT_PRESET]
        fallback = {
            "eta_zeta": settings.ETA_ZETA,
            "eta_eps": settings.ETA_EPS,
            "eta_kk": settings.ETA_EPS,
            "eta_increment": 1e-3,
            "max_epochs": 200,
        }
        update: Dict[str, object] = {}
        for name, default in fallback.items():
            if getattr(self, name) is None:
                update[name] = values.get(name, default)
        if self.trainable is None:
            update["trainable"] = TrainableFlags(**values.get("trainable", {}))
        return self.model_copy(update=update)

    def etas(self) -> Dict[str, float]:
        return {
            "zeta": float(self.eta_zeta or settings.ETA_ZETA),
            "eps": float(self.eta_eps or settings.ETA_EPS),
            "kk": float(self.eta_kk or settings.ETA_EPS),
        }

    def mask(self) -> Dict[str, bool]:
        return (self.trainable or TrainableFlags()).as_mask()

    @property
    def epochs(self) -> int:
        return int(self.max_epochs or 1)


class RampConfig(BaseModel):
    """Time grid, inverse-temperature ramp and tunneling ramp."""

    model_config = ConfigDict(extra="forbid")

    t_f: float = Field(default_factory=lambda: settings.T_F, gt=0)
    dt: float = Field(default_factory=lambda: settings.DT, gt=0)
    beta_f: float = Field(default_factory=lambda: settings.BETA_F, ge=0)
    k0: float = Field(default_factory=lambda: settings.K0, gt=0)
    ramp_end_fraction: float = Field(
        default_factory=lambda: settings.RAMP_END_FRACTION, gt=0, le=1
    )

    @model_validator(mode="after")
    def check_grid(self) -> "RampConfig":
        steps = round(self.t_f / self.dt)
        if steps < 2 or abs(steps * self.dt - self.t_f) > 1e-9 * max(1.0, self.t_f):
            raise ValueError(
                f"t_f={self.t_f} must be a whole number (>= 2) of dt={self.dt} steps"
            )
        return self

    @property
    def timesteps(self) -> int:
        return int(round(self.t_f / self.dt))

    def beta_ramp(self) -> BetaRamp:
        return BetaRamp(beta_f=self.beta_f, t_f=self.t_f)


class NoiseSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    samples: int = Field(default=1000, ge=1)
    magnitudes: List[float] = Field(default_factory=default_magnitudes)
    mode: Literal["complex-entrywise"] = "complex-entrywise"

    @field_validator("magnitudes")
    @classmethod
    def validate_magnitudes(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("at least one noise magnitude is required")
        if any(m <= 0 for m in v):
            raise ValueError("noise magnitudes must be positive")
        return v


class ExperimentConfig(BaseModel):
    """One experiment document (JSON, snake_case keys)."""

    model_config = ConfigDict(extra="forbid")

    kind: ExperimentKind
    n: int = Field(default=2, ge=1, le=8)
    preset: Optional[str] = None

    # broken-path: first leg in `path`, later legs seeded from the previous one
    path: Optional[PathSpec] = None
    next_legs: List[PathSpec] = Field(default_factory=list)

    # anneal-train / monotone / noise-mc target: "ghz", "w" or a basis bit string
    target: str = "ghz"

    training: TrainingConfig = Field(default_factory=TrainingConfig)
    ramp: RampConfig = Field(default_factory=RampConfig)
    noise: Optional[NoiseSpec] = None

    # size-bootstrap chain starts at this size
    bootstrap_from: int = Field(default=2, ge=2, le=8)
    # S_w mode: steps until every parameter reaches its final value (default: all)
    anneal_steps: Optional[int] = Field(default=None, ge=1)

    seed_schedule_file: Optional[str] = None
    rng_seed: int = 0
    # unset: a fresh <OUTPUT_DIR>/<kind>-n<n>-<timestamp> directory
    output_dir: Optional[str] = None

    @field_validator("target")
    @classmethod
    def validate_target(cls, v: str) -> str:
        if not TARGET_PATTERN.match(v):
            raise ValueError("target must be 'ghz', 'w' or a bit string such as '00'")
        return v

    @field_validator("preset")
    @classmethod
    def validate_preset(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and v not in TRAINING_PRESETS:
            raise ValueError(f"unknown preset {v!r}; known: {', '.join(sorted(TRAINING_PRESETS))}")
        return v

    @model_validator(mode="after")
    def check_kind_requirements(self) -> "ExperimentConfig":
        problems: List[str] = []
        if self.kind == "broken-path":
            if self.path is None:
                problems.append("broken-path needs a `path`")
            for leg in ([self.path] if self.path else []) + self.next_legs:
                if leg.n != self.n:
                    problems.append(f"path leg {leg.family.value} has n={leg.n}, experiment n={self.n}")
        elif self.next_legs:
            problems.append("`next_legs` is only used by broken-path")
        if self.kind == "size-bootstrap" and self.n <= self.bootstrap_from:
            problems.append(f"size-bootstrap needs n > bootstrap_from ({self.bootstrap_from})")
        if self.kind == "noise-mc" and self.noise is None:
            self.noise = NoiseSpec()
        if self.target in ("ghz", "w") and self.n < 2:
            problems.append(f"target {self.target} needs n >= 2")
        if self.target not in ("ghz", "w") and len(self.target) != self.n:
            problems.append(f"target {self.target!r} does not have {self.n} bits")
        if self.training.init_policy == "seed-schedule" and not self.seed_schedule_file:
            problems.append("init_policy 'seed-schedule' needs seed_schedule_file")
        if self.anneal_steps is not None and self.anneal_steps > self.ramp.timesteps:
            problems.append(
                f"anneal_steps={self.anneal_steps} exceeds the {self.ramp.timesteps} steps of the run"
            )
        if problems:
            raise ValueError("; ".join(problems))
        return self

    def resolved_training(self) -> TrainingConfig:
        return self.training.resolved(self.preset or KIND_PRESETS.get(self.kind))


def validate_experiment(data: dict) -> ExperimentConfig:
    """
    Validate a raw document, reporting every violation at once.

    Raises:
        ConfigValidationError: listing each field error as "location: message"
    """
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        violations: List[str] = []
        for err in e.errors():
            loc = ".".join(str(p) for p in err["loc"]) or "config"
            msg = str(err["msg"]).removeprefix("Value error, ")
            violations.extend(f"{loc}: {part}" for part in msg.split("; "))
        raise ConfigValidationError(violations) from e
