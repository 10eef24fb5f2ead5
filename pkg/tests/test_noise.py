import numpy as np
import pytest

from app.core.errors import RejectedSampleError
from app.core.qops import dagger
from app.models.noise import Exclusion, NoiseSample
from app.models.schedule import BetaRamp
from app.schemas.experiment import NoiseSpec, TrainingConfig
from app.services.adjoint_service import loss
from app.services.noise_service import draw_sample, make_rng, noise_mc, perturb_flat, summarize
from app.services.propagation_service import run_forward
from app.services.schedule_service import initial_schedule
from app.services.state_service import flat_state, ghz_state
from app.services.training_service import train
from app.worker import NoiseContext, NoiseJob, evaluate_sample, run_jobs


class TestPerturbation:
    def test_hermitian_unit_trace(self):
        rng = make_rng(3)
        for magnitude in (0.0, 0.05, 0.2):
            rho, recorded = perturb_flat(2, magnitude, rng)
            np.testing.assert_allclose(rho, dagger(rho), atol=1e-14)
            assert np.trace(rho) == pytest.approx(1.0, abs=1e-12)
            assert recorded >= 0

    def test_zero_magnitude_is_flat(self):
        rho, recorded = perturb_flat(3, 0.0, make_rng(0))
        np.testing.assert_allclose(rho, flat_state(3), atol=1e-15)
        assert recorded == 0

    def test_recorded_magnitude_tracks_request(self):
        rng = make_rng(11)
        small = np.mean([perturb_flat(2, 0.02, rng)[1] for _ in range(200)])
        large = np.mean([perturb_flat(2, 0.2, rng)[1] for _ in range(200)])
        assert large > 5 * small

    def test_same_seed_same_draws(self):
        a, _ = perturb_flat(2, 0.1, make_rng(5))
        b, _ = perturb_flat(2, 0.1, make_rng(5))
        np.testing.assert_array_equal(a, b)

    def test_hopeless_magnitude_is_rejected(self):
        # trace noise dominates: std per entry far above the flat trace
        rng = make_rng(1)
        with pytest.raises(RejectedSampleError):
            for _ in range(50):
                perturb_flat(1, 1e6, rng)
        with pytest.raises(RejectedSampleError):
            perturb_flat(1, -0.1, make_rng(1))

    def test_draw_sample_retries(self):
        rho, _ = draw_sample(2, 0.1, make_rng(2))
        assert np.trace(rho) == pytest.approx(1.0)


def test_summary_groups_by_requested_magnitude():
    samples = [
        NoiseSample(0, 0.1, 0.09, 0.02),
        NoiseSample(1, 0.2, 0.21, 0.05),
        NoiseSample(2, 0.1, 0.11, 0.04),
    ]
    rows = summarize(samples)
    assert [r["requested"] for r in rows] == [0.1, 0.2]
    assert rows[0]["count"] == 2
    assert rows[0]["mean_magnitude"] == pytest.approx(0.10)
    assert rows[0]["max_rms"] == 0.04
    assert rows[0]["mean_rms"] == pytest.approx(0.03)


class TestWorker:
    def context(self):
        s = initial_schedule(2, 5, 1.0, 0.2)
        s.zeta[:] = 0.2
        return NoiseContext(schedule=s, ramp=BetaRamp(0.5, 5.0), rho_des=ghz_state(2))

    def test_evaluates_like_a_forward_run(self):
        ctx = self.context()
        rho0, mag = perturb_flat(2, 0.1, make_rng(4))
        out = evaluate_sample(NoiseJob(index=7, requested=0.1, magnitude=mag, rho0=rho0), ctx)
        assert isinstance(out, NoiseSample)
        expected = loss(run_forward(rho0, ctx.schedule, ctx.ramp), ctx.rho_des).rms
        assert out.rms == pytest.approx(expected)
        assert out.index == 7

    def test_failures_become_exclusions(self):
        ctx = self.context()
        bad = 2 * flat_state(2)
        out = evaluate_sample(NoiseJob(index=1, requested=0.1, magnitude=0.0, rho0=bad), ctx)
        assert isinstance(out, Exclusion)
        assert out.category == "contract"
        assert out.error_summary

    def test_outcomes_follow_job_order(self):
        ctx = self.context()
        rng = make_rng(9)
        jobs = [NoiseJob(i, 0.05, 0.0, perturb_flat(2, 0.05, rng)[0]) for i in range(4)]
        assert [o.index for o in run_jobs(jobs, ctx, workers=1)] == [0, 1, 2, 3]


class TestNoiseMC:
    def setup_method(self):
        self.s = initial_schedule(2, 5, 1.0, 0.2)
        self.s.zeta[:] = 0.2
        self.ramp = BetaRamp(0.5, 5.0)

    def test_report(self):
        spec = NoiseSpec(samples=12, magnitudes=[0.05, 0.1, 0.2])
        report = noise_mc(spec, self.s, self.ramp, ghz_state(2), rng_seed=3)
        assert len(report.samples) + report.excluded == 12
        assert [r["requested"] for r in report.summary] == [0.05, 0.1, 0.2]
        assert np.isfinite(report.slope)
        baseline = loss(run_forward(flat_state(2), self.s, self.ramp), ghz_state(2)).rms
        assert report.baseline_rms == pytest.approx(baseline)

    def test_deterministic_for_a_seed(self):
        spec = NoiseSpec(samples=6, magnitudes=[0.1, 0.2])
        a = noise_mc(spec, self.s, self.ramp, ghz_state(2), rng_seed=21)
        b = noise_mc(spec, self.s, self.ramp, ghz_state(2), rng_seed=21)
        assert a.samples == b.samples

    def test_single_magnitude_has_no_slope(self):
        report = noise_mc(NoiseSpec(samples=3, magnitudes=[0.1]), self.s, self.ramp, ghz_state(2))
        assert np.isnan(report.slope)

    @pytest.mark.slow
    def test_trained_bell_schedule_is_robust(self):
        ramp = BetaRamp(2500.0, 5000.0)
        cfg = TrainingConfig(max_epochs=200).resolved("bell")
        trained = train(cfg, initial_schedule(2, 2000, 2.5, 1.5e-3), ramp, flat_state(2), ghz_state(2))
        report = noise_mc(NoiseSpec(samples=1000), trained.schedule, ramp, ghz_state(2), rng_seed=0)
        assert report.slope < 1.0
        assert report.baseline_rms == pytest.approx(trained.final.rms, abs=1e-15)
