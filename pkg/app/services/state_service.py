"""
Initial, target and broken-path states.

Every constructor follows the basis convention of app.core.qops: qubit 1 is the
most significant bit and |0> carries spin +1.
"""
from __future__ import annotations

from typing import Callable, Dict, List, Optional

import numpy as np

from app.core.errors import ContractViolation, QubitArgumentError
from app.core.qops import ComplexMatrix, check_qubit_count, qubit_count_of, spin_signs
from app.models.state import PureState
from app.schemas.path import FAMILY_QUBITS, PathFamily, PathSpec

TRACE_TOL = 1e-8


def _ket(n: int, weights: Dict[str, float]) -> PureState:
    """Normalized state from bit-string weights; unlisted basis states get 0."""
    amps = np.zeros(2**n, dtype=np.complex128)
    for bits, w in weights.items():
        amps[int(bits, 2)] = w
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise QubitArgumentError("state has no nonzero amplitude")
    return PureState(n=n, amplitudes=amps / norm)


def _require_at_least_two(n: int, what: str) -> int:
    n = check_qubit_count(n)
    if n < 2:
        raise QubitArgumentError(f"{what} state needs at least 2 qubits, got {n}")
    return n


def flat_pure(n: int) -> PureState:
    n = check_qubit_count(n)
    return PureState(n=n, amplitudes=np.full(2**n, 2 ** (-n / 2), dtype=np.complex128))


def flat_state(n: int) -> ComplexMatrix:
    n = check_qubit_count(n)
    return np.full((2**n, 2**n), 1.0 / 2**n, dtype=np.complex128)


def ghz_pure(n: int) -> PureState:
    n = _require_at_least_two(n, "GHZ")
    return _ket(n, {"0" * n: 1.0, "1" * n: 1.0})


def ghz_state(n: int) -> ComplexMatrix:
    return ghz_pure(n).density()


def w_pure(n: int) -> PureState:
    n = _require_at_least_two(n, "W")
    return _ket(n, {"0" * q + "1" + "0" * (n - q - 1): 1.0 for q in range(n)})


def w_state(n: int) -> ComplexMatrix:
    return w_pure(n).density()


def basis_pure(bits: str) -> PureState:
    if not bits or set(bits) - {"0", "1"}:
        raise QubitArgumentError(f"not a computational basis bit string: {bits!r}")
    n = check_qubit_count(len(bits))
    return _ket(n, {bits: 1.0})


def basis_state(bits: str) -> ComplexMatrix:
    return basis_pure(bits).density()


def _all_bits(n: int) -> List[str]:
    return [format(i, f"0{n}b") for i in range(2**n)]


def _rest(n: int, keep: List[str], weight: float) -> Dict[str, float]:
    """`weight` on every basis state not in `keep`."""
    return {b: weight for b in _all_bits(n) if b not in keep}


# Each family maps gamma to bit-string weights; _ket normalizes.
def _y(g: float) -> Dict[str, float]:
    return {"00": 1.0, **_rest(2, ["00"], 1.0 - g)}


def _y_prime(g: float) -> Dict[str, float]:
    return {"00": 1.0, "11": g}


def _x(g: float) -> Dict[str, float]:
    return {"000": 1.0, "011": 1.0, **_rest(3, ["000", "011"], 1.0 - g)}


def _x_prime(g: float) -> Dict[str, float]:
    return {"000": 1.0, "011": 1.0 - g, "111": g}


def _v(g: float) -> Dict[str, float]:
    return {"01": 1.0, **_rest(2, ["01"], 1.0 - g)}


def _v_prime(g: float) -> Dict[str, float]:
    # V'(0) = |01>, V'(1) = W2
    return {"01": 1.0, "10": g}


def _v3(g: float) -> Dict[str, float]:
    return {"001": 1.0, **_rest(3, ["001"], 1.0 - g)}


FAMILY_WEIGHTS: Dict[PathFamily, Callable[[float], Dict[str, float]]] = {
    PathFamily.Y: _y,
    PathFamily.Y_PRIME: _y_prime,
    PathFamily.X: _x,
    PathFamily.X_PRIME: _x_prime,
    PathFamily.V: _v,
    PathFamily.V_PRIME: _v_prime,
    PathFamily.V3: _v3,
}


def path_state(spec: PathSpec, gamma: float) -> PureState:
    """
    Member gamma of a broken-path family.

    `ghz`, `w` and `flat` ignore gamma; the closed-form families require their
    fixed qubit count (checked on the PathSpec).
    """
    if not 0.0 <= gamma <= 1.0:
        raise QubitArgumentError(f"gamma must lie in [0, 1], got {gamma}")

    family = spec.family
    if family == PathFamily.FLAT:
        return flat_pure(spec.n)
    if family == PathFamily.GHZ:
        return ghz_pure(spec.n)
    if family == PathFamily.W:
        return w_pure(spec.n)
    if FAMILY_QUBITS[family] != spec.n:
        raise QubitArgumentError(
            f"family {family.value} is defined for n={FAMILY_QUBITS[family]}, got n={spec.n}"
        )
    return _ket(spec.n, FAMILY_WEIGHTS[family](float(gamma)))


def path_start(spec: PathSpec) -> ComplexMatrix:
    """
    State a leg starts from: the explicit basis override, else the family at
    gamma = 0 (flat for the gamma-free families).
    """
    if spec.start is not None:
        return basis_state(spec.start)
    if spec.gamma_free:
        return flat_state(spec.n)
    return path_state(spec, 0.0).density()


def spin_averages(rho: ComplexMatrix, trace_tol: Optional[float] = TRACE_TOL) -> List[float]:
    """<sigma_z> of every qubit, Re tr(rho sigma_z,q)."""
    n = qubit_count_of(rho)
    tr = np.trace(rho)
    if trace_tol is not None and abs(tr - 1.0) > trace_tol:
        raise ContractViolation(f"spin averages need a unit-trace state, trace = {tr:.6g}")
    diag = np.real(np.diag(rho))
    return [float(v) for v in spin_signs(n) @ diag]
