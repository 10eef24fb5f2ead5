"""
Test configuration and fixtures
"""
from typing import Callable, Optional

import numpy as np
import pytest

from app.models.schedule import ScheduleSet
from app.services.propagation_service import clear_eig_cache


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


@pytest.fixture
def random_schedule(rng: np.random.Generator) -> Callable[..., ScheduleSet]:
    """Schedules with every value uniform in [-scale, scale]."""

    def make(
        n: int = 2,
        timesteps: int = 5,
        dt: float = 1.0,
        scale: float = 0.01,
        generator: Optional[np.random.Generator] = None,
    ) -> ScheduleSet:
        g = generator or rng
        s = ScheduleSet.zeros(n, timesteps, dt, {"zeta": True, "eps": True, "kk": True})
        s.zeta[:] = g.uniform(-scale, scale, s.zeta.shape)
        s.eps[:] = g.uniform(-scale, scale, s.eps.shape)
        s.kk[:] = g.uniform(-scale, scale, s.kk.shape)
        return s

    return make


@pytest.fixture(autouse=True)
def fresh_eig_cache():
    clear_eig_cache()
    yield
    clear_eig_cache()


@pytest.fixture
def small_run_doc(tmp_path):
    """A tiny experiment document: 5 steps, short runs, output under tmp_path."""

    def make(kind: str, **extra):
        doc = {
            "kind": kind,
            "n": 2,
            "ramp": {"t_f": 5.0, "dt": 1.0, "beta_f": 0.5, "k0": 0.2},
            "training": {"max_epochs": 3, "eta_zeta": 1e-2},
            "output_dir": str(tmp_path / "run"),
        }
        doc.update(extra)
        return doc

    return make
