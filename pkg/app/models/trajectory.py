from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from app.core.qops import ComplexMatrix, RealVector, dagger, unitary_from_eig

Eigensystem = Tuple[RealVector, ComplexMatrix]


@dataclass
class Trajectory:
    """
    Result of one forward run.

    rho_s[k] is the real-time state at t_k (T+1 entries). Hamiltonians and
    propagators are kept as eigensystems, one per step, and rebuilt on demand.
    Interaction-picture states are filled lazily by the propagation service;
    the final one is always present after run_forward.
    """

    n: int
    dt: float
    rho_s: List[ComplexMatrix]
    eigs: List[Eigensystem]
    betas: RealVector
    rho_i_cache: Dict[int, ComplexMatrix] = field(default_factory=dict)

    @property
    def timesteps(self) -> int:
        return len(self.eigs)

    def hamiltonian(self, k: int) -> ComplexMatrix:
        evals, evecs = self.eigs[k]
        return (evecs * evals) @ dagger(evecs)

    def unitary(self, k: int) -> ComplexMatrix:
        evals, evecs = self.eigs[k]
        return unitary_from_eig(evals, evecs, self.dt)

    def transform_step(self, k: int) -> int:
        """Step whose Hamiltonian defines rho_I(t_k): the one that produced rho_S(t_k)."""
        return max(k - 1, 0)

    @property
    def rho_final(self) -> ComplexMatrix:
        return self.rho_s[-1]

    @property
    def rho_i_final(self) -> ComplexMatrix:
        return self.rho_i_cache[self.timesteps]

    @property
    def beta_final(self) -> float:
        return float(self.betas[-1])

    def traces(self) -> np.ndarray:
        return np.array([np.trace(r) for r in self.rho_s])
