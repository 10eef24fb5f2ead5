from __future__ import annotations

import math
from typing import Dict, Optional, Sequence

import numpy as np

from app.core.config import settings
from app.core.errors import DegenerateScheduleError, QubitArgumentError
from app.core.qops import ComplexMatrix, check_qubit_count, embed_pauli, spin_signs
from app.models.schedule import BetaRamp, FloatArray, MonotoneSchedule, Pair, ScheduleSet, all_pairs

DEGENERATE_TOL = 1e-12
TIME_TOL = 1e-9


def default_tunneling_ramp(
    timesteps: int, k0: float, end_fraction: Optional[float] = None
) -> FloatArray:
    """Linear descent from k0 at step 0 to zero at floor(T * end_fraction), zero after."""
    if timesteps < 2:
        raise QubitArgumentError(f"the tunneling ramp needs T >= 2, got {timesteps}")
    if k0 <= 0:
        raise QubitArgumentError(f"k0 must be positive, got {k0}")
    frac = settings.RAMP_END_FRACTION if end_fraction is None else end_fraction
    if not 0 < frac <= 1:
        raise QubitArgumentError(f"ramp end fraction must lie in (0, 1], got {frac}")

    end = max(1, math.floor(timesteps * frac))
    k = np.arange(timesteps, dtype=np.float64)
    return np.where(k < end, k0 * (1.0 - k / end), 0.0)


def beta_at(ramp: BetaRamp, t: float) -> float:
    if not -TIME_TOL <= t <= ramp.t_f + TIME_TOL:
        raise QubitArgumentError(f"t={t} outside [0, {ramp.t_f}]")
    return ramp.beta_f * min(max(t, 0.0), ramp.t_f) / ramp.t_f


def beta_grid(ramp: BetaRamp, s: ScheduleSet) -> FloatArray:
    """beta(t_k) for k = 0..T."""
    if abs(s.t_f - ramp.t_f) > TIME_TOL * max(1.0, ramp.t_f):
        raise QubitArgumentError(f"schedule spans t_f={s.t_f}, ramp expects {ramp.t_f}")
    return ramp.beta_f * np.arange(s.timesteps + 1, dtype=np.float64) / s.timesteps


def hamiltonian_from_coefficients(
    n: int, pairs: Sequence[Pair], coeffs: FloatArray
) -> ComplexMatrix:
    """
    H from one step's (zeta, eps, kk) vector, as laid out by
    ScheduleSet.step_coefficients. The Z terms are diagonal.
    """
    p = len(pairs)
    zeta, eps, kk = coeffs[:p], coeffs[p : p + n], coeffs[p + n :]
    signs = spin_signs(n)

    diag = signs.T @ eps
    for value, (a, b) in zip(zeta, pairs):
        if value:
            diag = diag + value * signs[a] * signs[b]
    h = np.diag(diag).astype(np.complex128)
    for q in range(n):
        if kk[q]:
            h = h + kk[q] * embed_pauli("x", q, n)
    return h


def assemble_hamiltonian(s: ScheduleSet, k: int) -> ComplexMatrix:
    if not 0 <= k < s.timesteps:
        raise QubitArgumentError(f"step {k} out of range for T={s.timesteps}")
    return hamiltonian_from_coefficients(s.n, s.pairs, s.step_coefficients(k))


def initial_schedule(
    n: int,
    timesteps: int,
    dt: float,
    k0: float,
    trainable_mask: Optional[Dict[str, bool]] = None,
    end_fraction: Optional[float] = None,
) -> ScheduleSet:
    """Zero couplings and biases under the standard tunneling ramp on every qubit."""
    s = ScheduleSet.zeros(n, timesteps, dt, trainable_mask)
    s.kk[:] = default_tunneling_ramp(timesteps, k0, end_fraction)
    return s


def monotone_fractions(m: MonotoneSchedule) -> FloatArray:
    """f_k = (S_w(k) - s0) / (S_w(t_kf) - s0); 1 from the last annealing step on."""
    total = float(np.sum(m.increments))
    if total <= DEGENERATE_TOL:
        raise DegenerateScheduleError(f"S_w has no range (total increment {total:.3e})")
    return (m.s_w() - m.s0) / total


def expand_monotone(m: MonotoneSchedule, k0: Optional[float] = None) -> ScheduleSet:
    """
    Full schedule generated by S_w: zeta and eps rise linearly in S_w from 0 to
    their final values, K falls from k0 to 0.

    S_w is the inclusive cumulative sum, so step 0 already carries the first
    increment: f_0 = increments[0] / total, not 0. With uniform increments over
    T annealing steps zeta starts at zeta_final / T and K at k0 * (1 - 1/T).
    """
    f = monotone_fractions(m)
    k0 = m.k0 if k0 is None else k0
    return ScheduleSet(
        n=m.n,
        dt=m.dt,
        zeta=np.outer(m.zeta_final, f),
        eps=np.outer(m.eps_final, f),
        kk=np.tile(k0 * (1.0 - f), (m.n, 1)),
        trainable_mask=dict(m.trainable_mask),
        pairs=all_pairs(m.n),
    )


def lift_pair_schedule(zeta2: FloatArray, n: int) -> FloatArray:
    """Copy one pair coupling series into every unordered pair of n qubits."""
    n = check_qubit_count(n)
    if n < 3:
        raise QubitArgumentError(f"lifting needs n >= 3, got {n}")
    series = np.asarray(zeta2, dtype=np.float64).ravel()
    return np.tile(series, (len(all_pairs(n)), 1))


def seed_from_smaller(
    trained: ScheduleSet,
    n: int,
    k0: float,
    trainable_mask: Optional[Dict[str, bool]] = None,
    end_fraction: Optional[float] = None,
) -> ScheduleSet:
    """
    Size-bootstrap seed: every pair of the larger system starts from the mean
    pair coupling of the trained smaller one; eps = 0, standard K ramp.
    """
    if n <= trained.n:
        raise QubitArgumentError(f"cannot bootstrap from n={trained.n} to n={n}")
    s = initial_schedule(n, trained.timesteps, trained.dt, k0, trainable_mask, end_fraction)
    s.zeta[:] = lift_pair_schedule(trained.zeta.mean(axis=0), n)
    return s
