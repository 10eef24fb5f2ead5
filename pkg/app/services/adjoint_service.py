"""
Loss and gradients of the final-state error with respect to every schedule value.

The gradient is the exact adjoint of the discrete forward pass in
propagation_service. Writing X = rho_I(t_f) and Lam = X - rho_des, the loss is
L = 1/2 ||Lam||_F^2 and dL = Re tr(Lam^dag dX). The co-state is carried as one
matrix and pulled back through the final transform and through every step
propagator; each step contributes Re tr(W_k dH_k), where W_k comes from the
Frechet derivative of the matrix exponential in the eigenbasis of H_k.
"""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.core.errors import ContractViolation, QubitArgumentError
from app.core.logging import get_logger
from app.core.qops import (
    ComplexMatrix,
    _require_same_shape,
    dagger,
    exp_divided_differences,
    expm_from_eig,
    spin_signs,
)
from app.models.schedule import PARAM_CLASSES, BetaRamp, FloatArray, MonotoneSchedule, ScheduleSet
from app.models.training import GradientSet, LossReport
from app.models.trajectory import Trajectory
from app.services.propagation_service import rms_error, run_forward
from app.services.schedule_service import monotone_fractions

logger = get_logger(__name__)

IMAG_TOL = 1e-10


def loss(traj: Trajectory, rho_des: ComplexMatrix, epoch: int = 0) -> LossReport:
    x = traj.rho_i_final
    _require_same_shape(x, rho_des)
    value = 0.5 * float(np.sum(np.abs(rho_des - x) ** 2))
    return LossReport(loss=value, rms=rms_error(x, rho_des), epoch=epoch)


def _check_compatible(traj: Trajectory, s: ScheduleSet) -> None:
    if traj.n != s.n or traj.timesteps != s.timesteps or traj.dt != s.dt:
        raise QubitArgumentError(
            f"trajectory (n={traj.n}, T={traj.timesteps}, dt={traj.dt}) was not produced "
            f"by this schedule (n={s.n}, T={s.timesteps}, dt={s.dt})"
        )


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > IMAG_TOL * max(1.0, abs(z)):
        raise ContractViolation(f"{what} gradient has imaginary part {z.imag:.3e}")
    return float(z.real)


def _project(
    w: ComplexMatrix, s: ScheduleSet
) -> Tuple[FloatArray, FloatArray, FloatArray]:
    """
    Re tr(W P) for every Hamiltonian term P, via the Hermitian part of W:
    Z-type terms read its diagonal, sigma_x on qubit q reads the entries that
    differ by that qubit's bit.
    """
    n = s.n
    wh = 0.5 * (w + dagger(w))
    diag = np.diag(wh)
    signs = spin_signs(n)
    idx = np.arange(2**n)

    d_eps = signs @ diag
    d_zeta = np.array([np.sum(diag * signs[a] * signs[b]) for a, b in s.pairs], dtype=np.complex128)
    d_kk = np.array(
        [np.sum(wh[idx, idx ^ (1 << (n - 1 - q))]) for q in range(n)], dtype=np.complex128
    )
    return (
        np.array([_real(z, "zeta") for z in d_zeta], dtype=np.float64),
        np.array([_real(z, "eps") for z in d_eps], dtype=np.float64),
        np.array([_real(z, "kk") for z in d_kk], dtype=np.float64),
    )


def _store(g: GradientSet, k: int, parts: Tuple[FloatArray, FloatArray, FloatArray]) -> None:
    g.d_zeta[:, k], g.d_eps[:, k], g.d_kk[:, k] = parts


def _frechet_weight(
    m: ComplexMatrix, evals: np.ndarray, evecs: ComplexMatrix, scale: complex
) -> ComplexMatrix:
    """
    W such that tr(M dE) = tr(W dH) for E = exp(scale * H):
    W = scale * V (V^dag M V o F) V^dag, F the divided differences of exp at scale * evals.
    """
    y = dagger(evecs) @ m @ evecs
    f = exp_divided_differences(scale * evals)
    return scale * (evecs @ (y * f) @ dagger(evecs))


def _beta_transform(
    traj: Trajectory, lam: ComplexMatrix, s: ScheduleSet, g_beta: GradientSet
) -> ComplexMatrix:
    """Pull the co-state back through X = A rho_T B, A = exp(-beta H), B = A^-1."""
    beta = traj.beta_final
    if beta == 0:
        return lam
    last = traj.timesteps - 1
    evals, evecs = traj.eigs[last]
    a = expm_from_eig(evals, evecs, -beta, clip=False)
    b = expm_from_eig(evals, evecs, beta, clip=False)
    x = traj.rho_i_final
    lam_h = dagger(lam)
    # dX through H_{T-1}: tr(Lam^dag dA rho B) + tr(Lam^dag A rho dB), dB = -B dA B
    n_mat = traj.rho_s[-1] @ b @ lam_h - b @ lam_h @ x
    _store(g_beta, last, _project(_frechet_weight(n_mat, evals, evecs, -beta), s))
    return a @ lam @ b


def _adjoint(
    traj: Trajectory, s: ScheduleSet, rho_des: ComplexMatrix, with_beta: bool
) -> GradientSet:
    _check_compatible(traj, s)
    x = traj.rho_i_final if with_beta else traj.rho_final
    _require_same_shape(x, rho_des)

    steps = GradientSet.zeros_like(s)
    g_beta = GradientSet.zeros_like(s)
    lam = x - rho_des
    if with_beta:
        lam = _beta_transform(traj, lam, s, g_beta)

    for k in range(traj.timesteps - 1, -1, -1):
        evals, evecs = traj.eigs[k]
        u = traj.unitary(k)
        rho = traj.rho_s[k]
        u_h = dagger(u)
        # dL = Re tr(M dU) with M = rho U^dag Lam^dag + rho^dag U^dag Lam
        m = rho @ u_h @ dagger(lam) + dagger(rho) @ u_h @ lam
        _store(steps, k, _project(_frechet_weight(m, evals, evecs, 1j * traj.dt), s))
        lam = u_h @ lam @ u

    return GradientSet(
        d_zeta=steps.d_zeta + g_beta.d_zeta,
        d_eps=steps.d_eps + g_beta.d_eps,
        d_kk=steps.d_kk + g_beta.d_kk,
        beta_part=g_beta,
    )


def gradient(
    traj: Trajectory, s: ScheduleSet, ramp: BetaRamp, rho_des: ComplexMatrix
) -> GradientSet:
    """
    dL/dw for every schedule value (all classes; callers apply the trainable mask).

    `beta_part` of the result is the contribution of the final imaginary-time
    transform alone.
    """
    if abs(traj.beta_final - ramp.beta_f) > 1e-12 * max(1.0, ramp.beta_f):
        raise QubitArgumentError(
            f"trajectory ends at beta={traj.beta_final}, ramp gives {ramp.beta_f}"
        )
    return _adjoint(traj, s, rho_des, with_beta=True)


def zero_temperature_gradient(
    traj: Trajectory, s: ScheduleSet, rho_des: ComplexMatrix
) -> GradientSet:
    """Adjoint of the loss on rho_S(t_f) itself, i.e. with the beta transform removed."""
    g = _adjoint(traj, s, rho_des, with_beta=False)
    g.beta_part = None
    return g


def commutator_gradient(
    traj: Trajectory, s: ScheduleSet, rho_des: ComplexMatrix
) -> GradientSet:
    """
    First-order continuous form: dL/dw_k ~ dt Re tr(Lam_{k+1}^dag i[P, rho_{k+1}]).

    Agrees with `gradient` to O(dt * ||H||); kept as a cross-check. The final
    transform's own dependence on H_{T-1} is not included.
    """
    _check_compatible(traj, s)
    g = GradientSet.zeros_like(s)
    lam = traj.rho_i_final - rho_des
    _require_same_shape(lam, rho_des)
    if traj.beta_final != 0:
        evals, evecs = traj.eigs[-1]
        lam = (
            expm_from_eig(evals, evecs, -traj.beta_final, clip=False)
            @ lam
            @ expm_from_eig(evals, evecs, traj.beta_final, clip=False)
        )

    for k in range(traj.timesteps - 1, -1, -1):
        rho_next = traj.rho_s[k + 1]
        lam_h = dagger(lam)
        # tr(Lam^dag i[P, rho]) = tr(i (rho Lam^dag - Lam^dag rho) P)
        w = 1j * traj.dt * (rho_next @ lam_h - lam_h @ rho_next)
        _store(g, k, _project(w, s))
        u = traj.unitary(k)
        lam = dagger(u) @ lam @ u
    return g


def fd_gradient(
    s: ScheduleSet,
    ramp: BetaRamp,
    rho0: ComplexMatrix,
    rho_des: ComplexMatrix,
    h: float = 1e-6,
    classes: Optional[Iterable[str]] = None,
    steps: Optional[Sequence[int]] = None,
) -> GradientSet:
    """
    Central finite differences of the loss.

    Differentiates the trainable classes (or `classes`) at every step, or only
    at `steps` when a subsampled grid is enough; every other entry is left 0.
    Costs two forward runs per differentiated value.
    """
    if h <= 0:
        raise QubitArgumentError(f"finite-difference step must be positive, got {h}")
    names = list(classes) if classes is not None else [
        c for c in PARAM_CLASSES if s.trainable_mask.get(c)
    ]
    cols: List[int] = list(steps) if steps is not None else list(range(s.timesteps))

    def _loss_at(trial: ScheduleSet) -> float:
        return loss(run_forward(rho0, trial, ramp), rho_des).loss

    g = GradientSet.zeros_like(s)
    out: Dict[str, FloatArray] = g.by_class()
    for name in names:
        for row in range(s.series(name).shape[0]):
            for k in cols:
                trial = s.copy()
                trial.series(name)[row, k] += h
                up = _loss_at(trial)
                trial.series(name)[row, k] -= 2 * h
                down = _loss_at(trial)
                out[name][row, k] = (up - down) / (2 * h)
    logger.debug("fd_gradient: %d classes, %d steps", len(names), len(cols))
    return g


def monotone_gradient(g: GradientSet, m: MonotoneSchedule) -> GradientSet:
    """
    Chain rule through expand_monotone.

    With f_k = S_k / C (S_k the running sum of increments, C their total) on the
    annealing steps and f = 1 after them:
      gf_k       = sum_p gzeta[p,k] zeta_f[p] + sum_q geps[q,k] eps_f[q] - k0 sum_q gK[q,k]
      dL/dinc_j  = (1/C) sum_{j<=k<T_a} gf_k - (1/C^2) sum_{k<T_a} gf_k S_k
      dL/dzeta_f = sum_k gzeta[:,k] f_k   (and likewise eps_f)
    """
    f = monotone_fractions(m)
    ta = m.anneal_steps
    total = float(np.sum(m.increments))
    running = np.cumsum(m.increments)

    gf = m.zeta_final @ g.d_zeta + m.eps_final @ g.d_eps - m.k0 * g.d_kk.sum(axis=0)
    gf = gf[:ta]
    tail_sums = np.cumsum(gf[::-1])[::-1]
    d_inc = tail_sums / total - float(np.dot(gf, running)) / total**2

    return GradientSet(
        d_zeta=g.d_zeta,
        d_eps=g.d_eps,
        d_kk=g.d_kk,
        beta_part=g.beta_part,
        d_increments=d_inc,
        d_zeta_final=g.d_zeta @ f,
        d_eps_final=g.d_eps @ f,
    )
