from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from app.core.errors import ContractViolation
from app.core.qops import ComplexMatrix, check_qubit_count

NORM_TOL = 1e-12


@dataclass(frozen=True)
class PureState:
    n: int
    amplitudes: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        check_qubit_count(self.n)
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if amps.size != 2**self.n:
            raise ContractViolation(f"expected {2**self.n} amplitudes, got {amps.size}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ContractViolation(f"state is not normalized (sum |a|^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def density(self) -> ComplexMatrix:
        a = self.amplitudes
        return np.outer(a, np.conj(a))
