"""
Forward simulation: exact piecewise-constant real-time stepping plus the
imaginary-time similarity transform rho_I = exp(-beta H) rho_S exp(+beta H).
"""
from __future__ import annotations

import logging
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from app.core.config import settings
from app.core.errors import AnnealError, ContractViolation, ExponentOverflowError, PropagationError
from app.core.logging import get_logger
from app.core.qops import (
    ComplexMatrix,
    _require_hermitian,
    _require_same_shape,
    dagger,
    frobenius_distance,
    herm_eig,
    hermiticity_defect,
    qubit_count_of,
    unitary_from_eig,
)
from app.models.schedule import BetaRamp, Pair, ScheduleSet
from app.models.trajectory import Eigensystem, Trajectory
from app.services.schedule_service import beta_grid, hamiltonian_from_coefficients

logger = get_logger(__name__)

TRACE_TOL = 1e-9


@lru_cache(maxsize=settings.EIG_CACHE_SIZE)
def _cached_eig(n: int, pairs: Tuple[Pair, ...], coeff_key: bytes) -> Eigensystem:
    coeffs = np.frombuffer(coeff_key, dtype=np.float64)
    evals, evecs = herm_eig(hamiltonian_from_coefficients(n, pairs, coeffs))
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return evals, evecs


def step_eigensystem(s: ScheduleSet, k: int) -> Eigensystem:
    """Eigensystem of H(t_k), shared between runs whose step-k coefficients coincide."""
    coeffs = np.ascontiguousarray(s.step_coefficients(k), dtype=np.float64)
    return _cached_eig(s.n, tuple(s.pairs), coeffs.tobytes())


def clear_eig_cache() -> None:
    _cached_eig.cache_clear()


def _check_trace(rho: ComplexMatrix) -> None:
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ContractViolation(f"density matrix trace is {tr:.12g}, expected 1")


def step_real_time(
    rho: ComplexMatrix, h: ComplexMatrix, dt: float
) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """One step of U rho U^dagger with U = exp(+i H dt); returns (rho', U)."""
    _require_same_shape(rho, h)
    _check_trace(rho)
    evals, evecs = herm_eig(h)
    u = unitary_from_eig(evals, evecs, dt)
    return u @ rho @ dagger(u), u


def _similarity_from_eig(
    rho_s: ComplexMatrix, evals: np.ndarray, evecs: ComplexMatrix, beta: float
) -> ComplexMatrix:
    if beta == 0:
        return rho_s.copy()
    exponent = beta * evals
    worst = float(np.max(np.abs(exponent))) if exponent.size else 0.0
    if worst > settings.EXPONENT_LIMIT:
        raise ExponentOverflowError(worst, settings.EXPONENT_LIMIT)
    # eigenbasis: (V^dag rho V)_ij * exp(-b l_i) * exp(+b l_j), one factor at a time
    rotated = dagger(evecs) @ rho_s @ evecs
    rotated = rotated * np.exp(-exponent)[:, None]
    rotated = rotated * np.exp(exponent)[None, :]
    return evecs @ rotated @ dagger(evecs)


def to_interaction(rho_s: ComplexMatrix, h: ComplexMatrix, beta: float) -> ComplexMatrix:
    """exp(-beta H) rho_S exp(+beta H); trace-preserving, not Hermitized or renormalized."""
    if beta < 0:
        raise ContractViolation(f"beta must be >= 0, got {beta}")
    _require_same_shape(rho_s, h)
    evals, evecs = herm_eig(h)
    return _similarity_from_eig(rho_s, evals, evecs, beta)


def interaction_state(traj: Trajectory, k: int) -> ComplexMatrix:
    """rho_I(t_k), computed on first use and cached on the trajectory."""
    cached = traj.rho_i_cache.get(k)
    if cached is not None:
        return cached
    evals, evecs = traj.eigs[traj.transform_step(k)]
    try:
        rho_i = _similarity_from_eig(traj.rho_s[k], evals, evecs, float(traj.betas[k]))
    except ExponentOverflowError as e:
        raise e.at_step(k) from e
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("rho_I(t_%d) Hermiticity defect %.3e", k, hermiticity_defect(rho_i))
    traj.rho_i_cache[k] = rho_i
    return rho_i


def run_forward(rho0: ComplexMatrix, s: ScheduleSet, ramp: BetaRamp) -> Trajectory:
    """Evolve rho0 through every step of `s`; rho_I(t_f) is computed eagerly."""
    if qubit_count_of(rho0) != s.n:
        raise ContractViolation(f"rho0 is {rho0.shape}, schedule is for {s.n} qubit(s)")
    _require_hermitian(rho0, "rho0")
    _check_trace(rho0)
    betas = beta_grid(ramp, s)

    rho = np.asarray(rho0, dtype=np.complex128)
    states = [rho]
    eigs = []
    for k in range(s.timesteps):
        try:
            evals, evecs = step_eigensystem(s, k)
        except AnnealError as e:
            raise PropagationError(k, e) from e
        u = unitary_from_eig(evals, evecs, s.dt)
        rho = u @ rho @ dagger(u)
        eigs.append((evals, evecs))
        states.append(rho)

    traj = Trajectory(n=s.n, dt=s.dt, rho_s=states, eigs=eigs, betas=betas)
    try:
        interaction_state(traj, s.timesteps)
    except ExponentOverflowError as e:
        raise PropagationError(s.timesteps, e) from e
    return traj


def rms_error(rho_i_final: ComplexMatrix, rho_des: ComplexMatrix) -> float:
    """Entrywise RMS over all 4^n entries: Frobenius distance / 2^n."""
    return frobenius_distance(rho_i_final, rho_des) / rho_des.shape[0]


def final_rms(
    rho0: ComplexMatrix, s: ScheduleSet, ramp: BetaRamp, rho_des: ComplexMatrix
) -> float:
    traj = run_forward(rho0, s, ramp)
    return rms_error(traj.rho_i_final, rho_des)


def evolve_constant(rho0: ComplexMatrix, h: ComplexMatrix, duration: float) -> ComplexMatrix:
    """Single-shot exp(iH t) rho exp(-iH t) for a constant Hamiltonian."""
    rho, _ = step_real_time(rho0, h, duration)
    return rho


def interaction_states(
    traj: Trajectory, stride: Optional[int] = None
) -> Dict[int, ComplexMatrix]:
    """rho_I at every `stride`-th step plus the final step, keyed by step."""
    stride = stride or 1
    steps = list(range(0, traj.timesteps + 1, stride))
    if steps[-1] != traj.timesteps:
        steps.append(traj.timesteps)
    return {k: interaction_state(traj, k) for k in steps}
