"""
Dense N-qubit operator algebra.

Basis convention: bit string b1 b2 ... bN maps to the integer with qubit 1 (site 0)
as the most significant bit, and sigma_z|0> = +|0>, so |0> carries spin +1.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Literal, Tuple

import numpy as np
import numpy.typing as npt

from app.core.config import settings
from app.core.errors import ContractViolation, QubitArgumentError
from app.core.logging import get_logger

logger = get_logger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]
RealVector = npt.NDArray[np.float64]
Axis = Literal["x", "z"]

MAX_QUBITS = 8
HERMITIAN_TOL = 1e-10

_SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def check_qubit_count(n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise QubitArgumentError(f"qubit count must be an integer in [1, {MAX_QUBITS}], got {n!r}")
    return int(n)


def qubit_count_of(m: npt.NDArray[np.generic]) -> int:
    """Infer n from a 2^n x 2^n matrix."""
    dim = m.shape[0]
    if m.ndim != 2 or m.shape[1] != dim or dim < 2 or dim & (dim - 1):
        raise QubitArgumentError(f"expected a square matrix of power-of-two size, got {m.shape}")
    return dim.bit_length() - 1


def dagger(m: ComplexMatrix) -> ComplexMatrix:
    return np.conj(m.T)


def hermiticity_defect(m: ComplexMatrix) -> float:
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def _require_hermitian(m: ComplexMatrix, what: str = "matrix") -> None:
    defect = hermiticity_defect(m)
    if defect > HERMITIAN_TOL:
        raise ContractViolation(f"{what} is not Hermitian (max |M - M^dagger| = {defect:.3e})")


def _require_same_shape(a: npt.NDArray[np.generic], b: npt.NDArray[np.generic]) -> None:
    if a.shape != b.shape:
        raise QubitArgumentError(f"dimension mismatch: {a.shape} vs {b.shape}")


@lru_cache(maxsize=None)
def embed_pauli(axis: str, site: int, n: int) -> ComplexMatrix:
    """
    sigma_axis on `site`, identity on every other qubit.

    The returned array is shared and read-only.
    """
    n = check_qubit_count(n)
    if axis not in _SIGMA:
        raise QubitArgumentError(f"unknown Pauli axis {axis!r}")
    if not 0 <= site < n:
        raise QubitArgumentError(f"site {site} out of range for {n} qubit(s)")

    out = np.ones((1, 1), dtype=np.complex128)
    for q in range(n):
        out = np.kron(out, _SIGMA[axis] if q == site else np.eye(2, dtype=np.complex128))
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def spin_signs(n: int) -> npt.NDArray[np.float64]:
    """(n, 2^n) table of sigma_z eigenvalues: +1 where qubit q is 0 in basis state i."""
    n = check_qubit_count(n)
    idx = np.arange(2**n)
    signs = np.array(
        [1.0 - 2.0 * ((idx >> (n - 1 - q)) & 1) for q in range(n)], dtype=np.float64
    )
    signs.setflags(write=False)
    return signs


def zz_coupling(a: int, b: int, n: int) -> ComplexMatrix:
    return embed_pauli("z", a, n) @ embed_pauli("z", b, n)


def herm_eig(m: ComplexMatrix) -> Tuple[RealVector, ComplexMatrix]:
    """Eigendecomposition of a Hermitian matrix (ascending eigenvalues, unitary vectors)."""
    _require_hermitian(m)
    evals, evecs = np.linalg.eigh(m)
    return evals.astype(np.float64), evecs.astype(np.complex128)


def expm_from_eig(
    evals: RealVector,
    evecs: ComplexMatrix,
    scale: float,
    clip: bool = True,
) -> ComplexMatrix:
    exponent = scale * evals
    limit = settings.EXPONENT_LIMIT
    if clip and exponent.size and np.max(np.abs(exponent)) > limit:
        logger.warning(
            "herm_expm: exponent %.6g clipped to +-%g", float(np.max(np.abs(exponent))), limit
        )
        exponent = np.clip(exponent, -limit, limit)
    return (evecs * np.exp(exponent)) @ dagger(evecs)


def herm_expm(m: ComplexMatrix, scale: float) -> ComplexMatrix:
    """exp(scale * M) for Hermitian M via its unitary eigendecomposition."""
    if scale == 0:
        _require_hermitian(m)
        return np.eye(m.shape[0], dtype=np.complex128)
    evals, evecs = herm_eig(m)
    return expm_from_eig(evals, evecs, scale)


def unitary_from_eig(evals: RealVector, evecs: ComplexMatrix, dt: float) -> ComplexMatrix:
    """exp(+i H dt) from the eigendecomposition of H."""
    return (evecs * np.exp(1j * dt * evals)) @ dagger(evecs)


def exp_divided_differences(a: npt.NDArray[np.complexfloating]) -> ComplexMatrix:
    """
    Divided differences of exp on the points a:
      F_ij = (e^a_i - e^a_j) / (a_i - a_j),  F_ii = e^a_i.

    In the eigenbasis of X, the Frechet derivative of exp at X along E is F * E
    (elementwise). Evaluated as exp(mean) * sinh(d/2)/(d/2) so that nearly
    degenerate points do not cancel.
    """
    a = np.asarray(a, dtype=np.complex128)
    mean = 0.5 * (a[:, None] + a[None, :])
    half = 0.5 * (a[:, None] - a[None, :])
    small = np.abs(half) < 1e-5
    safe = np.where(small, 1.0, half)
    sinhc = np.where(small, 1.0 + half * half / 6.0, np.sinh(safe) / safe)
    return np.exp(mean) * sinhc


def commutator(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    _require_same_shape(a, b)
    return a @ b - b @ a


def frobenius_distance(a: ComplexMatrix, b: ComplexMatrix) -> float:
    _require_same_shape(a, b)
    return float(np.sqrt(np.sum(np.abs(a - b) ** 2)))


def purity(rho: ComplexMatrix) -> float:
    return float(np.real(np.trace(rho @ rho)))
