from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from app.core.errors import QubitArgumentError
from app.core.qops import check_qubit_count

FloatArray = npt.NDArray[np.float64]
Pair = Tuple[int, int]

PARAM_CLASSES = ("zeta", "eps", "kk")
QUBIT_LETTERS = "ABCDEFGH"


def all_pairs(n: int) -> List[Pair]:
    return list(combinations(range(n), 2))


def default_mask() -> Dict[str, bool]:
    return {"zeta": True, "eps": False, "kk": False}


@dataclass
class ScheduleSet:
    """
    Piecewise-constant values of every Hamiltonian parameter on T steps of length dt.

    zeta has one row per unordered pair (in `pairs` order), eps and kk one row per qubit.
    """

    n: int
    dt: float
    zeta: FloatArray
    eps: FloatArray
    kk: FloatArray
    trainable_mask: Dict[str, bool] = field(default_factory=default_mask)
    pairs: List[Pair] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.n = check_qubit_count(self.n)
        if not self.pairs:
            self.pairs = all_pairs(self.n)
        if self.dt <= 0:
            raise QubitArgumentError(f"dt must be positive, got {self.dt}")

        eps = np.array(self.eps, dtype=np.float64)
        kk = np.array(self.kk, dtype=np.float64)
        zeta = np.array(self.zeta, dtype=np.float64)
        t = eps.size // self.n
        try:
            self.eps = eps.reshape(self.n, t)
            self.kk = kk.reshape(self.n, t)
            # a single qubit has no pairs; zeta stays an empty (0, T) block
            self.zeta = zeta.reshape(len(self.pairs), t)
        except ValueError as e:
            raise QubitArgumentError(
                "every parameter series must have the same number of steps "
                f"(zeta {zeta.shape}, eps {eps.shape}, kk {kk.shape})"
            ) from e
        if t < 1:
            raise QubitArgumentError("a schedule needs at least one step")
        for name in PARAM_CLASSES:
            self.trainable_mask.setdefault(name, False)

    @property
    def timesteps(self) -> int:
        return int(self.eps.shape[1])

    @property
    def t_f(self) -> float:
        return self.timesteps * self.dt

    def copy(self) -> "ScheduleSet":
        return replace(
            self,
            zeta=self.zeta.copy(),
            eps=self.eps.copy(),
            kk=self.kk.copy(),
            trainable_mask=dict(self.trainable_mask),
            pairs=list(self.pairs),
        )

    def series(self, name: str) -> FloatArray:
        if name not in PARAM_CLASSES:
            raise QubitArgumentError(f"unknown parameter class {name!r}")
        return getattr(self, name)  # type: ignore[no-any-return]

    def step_coefficients(self, k: int) -> FloatArray:
        """All parameter values in force during step k, as one vector (zeta, eps, kk)."""
        return np.concatenate([self.zeta[:, k], self.eps[:, k], self.kk[:, k]])

    def param_names(self, name: str) -> List[str]:
        if name == "zeta":
            return [f"zeta_{QUBIT_LETTERS[a]}{QUBIT_LETTERS[b]}" for a, b in self.pairs]
        return [f"{name}_{QUBIT_LETTERS[q]}" for q in range(self.n)]

    @classmethod
    def zeros(
        cls,
        n: int,
        timesteps: int,
        dt: float,
        trainable_mask: Optional[Dict[str, bool]] = None,
    ) -> "ScheduleSet":
        n = check_qubit_count(n)
        pairs = all_pairs(n)
        return cls(
            n=n,
            dt=dt,
            zeta=np.zeros((len(pairs), timesteps)),
            eps=np.zeros((n, timesteps)),
            kk=np.zeros((n, timesteps)),
            trainable_mask=dict(trainable_mask or default_mask()),
            pairs=pairs,
        )


@dataclass(frozen=True)
class BetaRamp:
    beta_f: float
    t_f: float

    def __post_init__(self) -> None:
        if self.beta_f < 0:
            raise QubitArgumentError(f"beta_f must be >= 0, got {self.beta_f}")
        if self.t_f <= 0:
            raise QubitArgumentError(f"t_f must be positive, got {self.t_f}")


@dataclass
class MonotoneSchedule:
    """
    Single annealing parameter S_w, stored as non-negative increments.

    S_w at step k is s0 + sum of increments[0..k]; parameters follow S_w linearly
    from their fixed start values to the trainable final values, and hold those
    after the annealing horizon (len(increments) steps).
    """

    n: int
    dt: float
    timesteps: int
    increments: FloatArray
    zeta_final: FloatArray
    eps_final: FloatArray
    s0: float = 0.0
    k0: float = 1.5e-3
    trainable_mask: Dict[str, bool] = field(default_factory=default_mask)

    def __post_init__(self) -> None:
        self.n = check_qubit_count(self.n)
        self.increments = np.array(self.increments, dtype=np.float64).ravel()
        self.zeta_final = np.array(self.zeta_final, dtype=np.float64).ravel()
        self.eps_final = np.array(self.eps_final, dtype=np.float64).ravel()
        if not 1 <= self.increments.size <= self.timesteps:
            raise QubitArgumentError(
                f"need between 1 and {self.timesteps} increments, got {self.increments.size}"
            )
        if np.any(self.increments < 0):
            raise QubitArgumentError("S_w increments must be non-negative")
        if self.zeta_final.size != len(all_pairs(self.n)) or self.eps_final.size != self.n:
            raise QubitArgumentError("final values do not match the qubit count")

    @property
    def anneal_steps(self) -> int:
        return int(self.increments.size)

    def s_w(self) -> FloatArray:
        """S_w on every step; constant after the annealing horizon."""
        cum = self.s0 + np.cumsum(self.increments)
        tail = np.full(self.timesteps - self.anneal_steps, cum[-1])
        return np.concatenate([cum, tail])

    def copy(self) -> "MonotoneSchedule":
        return replace(
            self,
            increments=self.increments.copy(),
            zeta_final=self.zeta_final.copy(),
            eps_final=self.eps_final.copy(),
            trainable_mask=dict(self.trainable_mask),
        )

    @classmethod
    def uniform(
        cls,
        n: int,
        timesteps: int,
        dt: float,
        k0: float,
        anneal_steps: Optional[int] = None,
    ) -> "MonotoneSchedule":
        n = check_qubit_count(n)
        steps = anneal_steps or timesteps
        return cls(
            n=n,
            dt=dt,
            timesteps=timesteps,
            increments=np.full(steps, 1.0 / steps),
            zeta_final=np.zeros(len(all_pairs(n))),
            eps_final=np.zeros(n),
            k0=k0,
        )
