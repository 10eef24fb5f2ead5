import numpy as np
import pytest

from app.core.errors import QubitArgumentError
from app.models.schedule import BetaRamp, MonotoneSchedule, ScheduleSet
from app.models.training import GradientSet
from app.services.adjoint_service import (
    commutator_gradient,
    fd_gradient,
    gradient,
    loss,
    monotone_gradient,
    zero_temperature_gradient,
)
from app.services.propagation_service import run_forward
from app.services.schedule_service import expand_monotone
from app.services.state_service import flat_state, ghz_state, w_state

ALL = ("zeta", "eps", "kk")


def assert_matches_fd(adjoint: GradientSet, fd: GradientSet) -> None:
    """Relative agreement on every component above the finite-difference noise floor."""
    scale = max(fd.max_abs(), 1e-300)
    for name in ALL:
        a, f = adjoint.by_class()[name], fd.by_class()[name]
        np.testing.assert_allclose(a, f, rtol=1e-4, atol=1e-7 * scale, err_msg=name)


class TestAgainstFiniteDifferences:
    @pytest.mark.parametrize("beta_f", [0.0, 10.0, 100.0])
    def test_random_two_qubit_instances(self, random_schedule, beta_f):
        rng = np.random.default_rng(int(beta_f) + 7)
        rho0, rho_des = flat_state(2), ghz_state(2)
        for _ in range(20):
            s = random_schedule(n=2, timesteps=5, dt=1.0, scale=0.01, generator=rng)
            ramp = BetaRamp(beta_f, s.t_f)
            g = gradient(run_forward(rho0, s, ramp), s, ramp, rho_des)
            fd = fd_gradient(s, ramp, rho0, rho_des, h=1e-6, classes=ALL)
            assert_matches_fd(g, fd)

    def test_three_qubits_larger_couplings(self, random_schedule):
        s = random_schedule(n=3, timesteps=4, dt=0.8, scale=0.3)
        ramp = BetaRamp(0.5, s.t_f)
        rho0, rho_des = flat_state(3), w_state(3)
        g = gradient(run_forward(rho0, s, ramp), s, ramp, rho_des)
        assert_matches_fd(g, fd_gradient(s, ramp, rho0, rho_des, classes=ALL))

    def test_subsampled_fd_leaves_other_entries_zero(self, random_schedule):
        s = random_schedule(n=2)
        s.trainable_mask = {"zeta": True, "eps": False, "kk": False}
        ramp = BetaRamp(1.0, s.t_f)
        fd = fd_gradient(s, ramp, flat_state(2), ghz_state(2), steps=[1, 3])
        assert not fd.d_eps.any() and not fd.d_kk.any()
        assert not fd.d_zeta[:, [0, 2, 4]].any()
        assert np.any(fd.d_zeta[:, [1, 3]])

    def test_fd_step_must_be_positive(self, random_schedule):
        s = random_schedule()
        with pytest.raises(QubitArgumentError):
            fd_gradient(s, BetaRamp(0.0, s.t_f), flat_state(2), ghz_state(2), h=0.0)


class TestBetaCorrection:
    def test_beta_zero_reduces_to_zero_temperature_adjoint(self, random_schedule):
        rho0, rho_des = flat_state(2), ghz_state(2)
        for _ in range(5):
            s = random_schedule(n=2, scale=0.3)
            ramp = BetaRamp(0.0, s.t_f)
            traj = run_forward(rho0, s, ramp)
            g = gradient(traj, s, ramp, rho_des)
            g0 = zero_temperature_gradient(traj, s, rho_des)
            assert g.beta_part is not None
            assert g.beta_part.max_abs() == 0
            for name in ALL:
                np.testing.assert_allclose(g.by_class()[name], g0.by_class()[name], atol=1e-12)

    def test_beta_part_lives_on_last_step(self, random_schedule):
        s = random_schedule(n=2, scale=0.05)
        ramp = BetaRamp(10.0, s.t_f)
        g = gradient(run_forward(flat_state(2), s, ramp), s, ramp, ghz_state(2))
        part = g.beta_part
        assert part is not None
        assert part.max_abs() > 0
        for arr in part.by_class().values():
            assert not arr[:, :-1].any()

    def test_ramp_mismatch(self, random_schedule):
        s = random_schedule()
        traj = run_forward(flat_state(2), s, BetaRamp(1.0, s.t_f))
        with pytest.raises(QubitArgumentError):
            gradient(traj, s, BetaRamp(2.0, s.t_f), ghz_state(2))

    def test_trajectory_from_another_schedule(self, random_schedule):
        s = random_schedule(timesteps=5)
        other = random_schedule(timesteps=4, dt=1.25)
        traj = run_forward(flat_state(2), other, BetaRamp(0.0, other.t_f))
        with pytest.raises(QubitArgumentError):
            gradient(traj, s, BetaRamp(0.0, s.t_f), ghz_state(2))


def _relative_commutator_gap(timesteps, t_f, columns):
    s = ScheduleSet.zeros(2, timesteps, t_f / timesteps, {"zeta": True, "eps": True, "kk": True})
    for name, col in columns.items():
        s.series(name)[:] = col[:, None]
    ramp = BetaRamp(0.0, s.t_f)
    traj = run_forward(flat_state(2), s, ramp)
    exact = gradient(traj, s, ramp, ghz_state(2))
    approx = commutator_gradient(traj, s, ghz_state(2))
    scale = exact.max_abs()
    assert scale > 0
    return max(np.max(np.abs(exact.by_class()[n] - approx.by_class()[n])) for n in ALL) / scale


def test_commutator_form_converges_at_first_order(rng):
    # same Hamiltonian at every step, so refining the grid keeps the problem fixed
    columns = {
        "zeta": rng.uniform(-1.0, 1.0, 1),
        "eps": rng.uniform(-1.0, 1.0, 2),
        "kk": rng.uniform(-1.0, 1.0, 2),
    }
    coarse = _relative_commutator_gap(200, 1.0, columns)
    fine = _relative_commutator_gap(400, 1.0, columns)
    assert fine <= 0.05
    assert fine < 0.75 * coarse


def test_loss_and_rms():
    s_rho, d_rho = flat_state(2), ghz_state(2)
    s = ScheduleSet.zeros(2, 3, 1.0)
    report = loss(run_forward(s_rho, s, BetaRamp(0.0, s.t_f)), d_rho, epoch=4)
    assert report.loss == pytest.approx(0.5)
    assert report.rms == pytest.approx(0.25)
    assert report.epoch == 4


def test_monotone_chain_rule_matches_fd(rng):
    m = MonotoneSchedule(
        n=2,
        dt=1.0,
        timesteps=6,
        increments=rng.uniform(0.2, 1.0, 4),
        zeta_final=[0.7],
        eps_final=[0.3, -0.4],
        k0=0.5,
    )
    ramp = BetaRamp(0.8, 6.0)
    rho0, rho_des = flat_state(2), ghz_state(2)

    def loss_of(trial: MonotoneSchedule) -> float:
        return loss(run_forward(rho0, expand_monotone(trial), ramp), rho_des).loss

    s = expand_monotone(m)
    g = monotone_gradient(gradient(run_forward(rho0, s, ramp), s, ramp, rho_des), m)

    h = 1e-6
    for field, analytic in (
        ("increments", g.d_increments),
        ("zeta_final", g.d_zeta_final),
        ("eps_final", g.d_eps_final),
    ):
        assert analytic is not None
        numeric = np.zeros_like(analytic)
        for j in range(analytic.size):
            up, down = m.copy(), m.copy()
            getattr(up, field)[j] += h
            getattr(down, field)[j] -= h
            numeric[j] = (loss_of(up) - loss_of(down)) / (2 * h)
        np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-8, err_msg=field)
