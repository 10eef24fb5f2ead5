from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from app.core.qops import ComplexMatrix
from app.models.schedule import FloatArray, MonotoneSchedule, ScheduleSet


@dataclass(frozen=True)
class LossReport:
    loss: float
    rms: float
    epoch: int

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.loss) and np.isfinite(self.rms))


@dataclass
class GradientSet:
    """
    dL/dw for every schedule value, same shapes as the ScheduleSet it differentiates.

    `beta_part` holds the contribution of the final imaginary-time transform alone
    (zero when beta_f = 0). In S_w mode the chain-ruled gradients are filled in
    `d_increments`, `d_zeta_final` and `d_eps_final`.
    """

    d_zeta: FloatArray
    d_eps: FloatArray
    d_kk: FloatArray
    beta_part: Optional["GradientSet"] = None
    d_increments: Optional[FloatArray] = None
    d_zeta_final: Optional[FloatArray] = None
    d_eps_final: Optional[FloatArray] = None

    def by_class(self) -> Dict[str, FloatArray]:
        return {"zeta": self.d_zeta, "eps": self.d_eps, "kk": self.d_kk}

    def is_finite(self) -> bool:
        arrays = list(self.by_class().values())
        arrays += [a for a in (self.d_increments, self.d_zeta_final, self.d_eps_final) if a is not None]
        return all(bool(np.all(np.isfinite(a))) for a in arrays)

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(a), initial=0.0)) for a in self.by_class().values())

    @classmethod
    def zeros_like(cls, s: ScheduleSet) -> "GradientSet":
        return cls(
            d_zeta=np.zeros_like(s.zeta),
            d_eps=np.zeros_like(s.eps),
            d_kk=np.zeros_like(s.kk),
        )


@dataclass
class TrainingResult:
    schedule: ScheduleSet
    reports: List[LossReport]
    final: LossReport
    # rho_I(t_f) under the returned schedule
    rho_i_final: Optional[ComplexMatrix] = None

    @property
    def initial(self) -> LossReport:
        return self.reports[0] if self.reports else self.final

    @property
    def epochs_run(self) -> int:
        return len(self.reports)

    def epochs_to(self, rms: float) -> Optional[int]:
        """First epoch whose rms is at or below `rms`, or None."""
        for r in self.reports:
            if r.rms <= rms:
                return r.epoch
        return None


@dataclass
class MonotoneResult:
    monotone: MonotoneSchedule
    schedule: ScheduleSet
    reports: List[LossReport]
    final: LossReport

    def epochs_to(self, rms: float) -> Optional[int]:
        for r in self.reports:
            if r.rms <= rms:
                return r.epoch
        return None


@dataclass
class GammaResult:
    gamma: float
    result: TrainingResult
    spins: List[float] = field(default_factory=list)


@dataclass
class SizeLevel:
    """One rung of a size-bootstrap chain, with the from-scratch initial rms for comparison."""

    n: int
    result: TrainingResult
    scratch_initial: Optional[LossReport] = None

    @property
    def seed_ratio(self) -> Optional[float]:
        if self.scratch_initial is None or self.scratch_initial.rms == 0:
            return None
        return self.result.initial.rms / self.scratch_initial.rms
