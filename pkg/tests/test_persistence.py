import json

import numpy as np
import pytest

from app.core.errors import RunStorageError
from app.db import csv_store
from app.db.session import run_session
from app.models.noise import Exclusion, NoiseSample
from app.models.schedule import MonotoneSchedule
from app.models.training import LossReport
from app.services.noise_service import summarize


class TestRunSession:
    def test_commit_moves_files_into_place(self, tmp_path):
        target = tmp_path / "runs" / "a"
        with run_session(target) as session:
            (session.path / "x.txt").write_text("hi")
            assert not target.exists()
        assert (target / "x.txt").read_text() == "hi"
        assert [p.name for p in target.parent.iterdir()] == ["a"]

    def test_failure_leaves_nothing(self, tmp_path):
        target = tmp_path / "b"
        with pytest.raises(ZeroDivisionError):
            with run_session(target) as session:
                (session.path / "partial.csv").write_text("step\n")
                1 / 0
        assert not target.exists()
        assert list(tmp_path.iterdir()) == []

    def test_os_errors_become_storage_errors(self, tmp_path):
        with pytest.raises(RunStorageError):
            with run_session(tmp_path / "c") as session:
                (session.path / "missing" / "f.csv").write_text("x")

    def test_non_empty_target_refused(self, tmp_path):
        target = tmp_path / "d"
        target.mkdir()
        (target / "keep.txt").write_text("old")
        with pytest.raises(RunStorageError):
            with run_session(target):
                pass
        assert (target / "keep.txt").read_text() == "old"

    def test_empty_target_reused(self, tmp_path):
        target = tmp_path / "e"
        target.mkdir()
        with run_session(target) as session:
            (session.path / "f").write_text("1")
        assert (target / "f").exists()

    def test_unwritable_parent(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(RunStorageError):
            with run_session(blocker / "run"):
                pass


class TestCsv:
    def test_errors_csv(self, tmp_path):
        csv_store.write_errors(tmp_path, [LossReport(0.5, 0.25, 1), LossReport(0.125, 0.1, 2)])
        text = (tmp_path / csv_store.ERRORS_CSV).read_text()
        assert text == "epoch,rms,loss\n1,0.25,0.5\n2,0.10000000000000001,0.125\n"

    def test_schedule_round_trip_is_exact(self, tmp_path, random_schedule):
        s = random_schedule(n=3, timesteps=4, dt=2.5, scale=1.0)
        csv_store.write_schedule(tmp_path, s)
        back = csv_store.read_schedule(tmp_path)
        for name in ("zeta", "eps", "kk"):
            np.testing.assert_array_equal(back.series(name), s.series(name))
        assert back.dt == 2.5
        assert back.trainable_mask == s.trainable_mask
        assert csv_store.read_schedule(tmp_path / csv_store.SCHEDULE_CSV).n == 3

    def test_schedule_csv_layout(self, tmp_path, random_schedule):
        csv_store.write_schedule(tmp_path, random_schedule(n=2, timesteps=2, dt=0.5))
        rows = csv_store.read_csv(tmp_path / csv_store.SCHEDULE_CSV)
        assert list(rows[0]) == ["step", "time", "param_name", "value"]
        names = [r["param_name"] for r in rows]
        assert names[:2] == ["zeta_AB", "zeta_AB"]
        assert set(names) == {"zeta_AB", "eps_A", "eps_B", "kk_A", "kk_B"}
        assert rows[1]["time"] == "0.5"

    def test_bad_schedule_row(self, tmp_path, random_schedule):
        csv_store.write_schedule(tmp_path, random_schedule(n=2, timesteps=2))
        path = tmp_path / csv_store.SCHEDULE_CSV
        path.write_text(path.read_text() + "9,9,zeta_AB,1.0\n")
        with pytest.raises(RunStorageError):
            csv_store.read_schedule(tmp_path)

    def test_missing_schedule(self, tmp_path):
        with pytest.raises(RunStorageError):
            csv_store.read_schedule(tmp_path)

    def test_sw_csv(self, tmp_path):
        m = MonotoneSchedule.uniform(2, 4, 1.0, k0=1.0, anneal_steps=2)
        csv_store.write_sw(tmp_path, m)
        rows = csv_store.read_csv(tmp_path / csv_store.SW_CSV)
        assert [float(r["s_w"]) for r in rows] == [0.5, 1.0, 1.0, 1.0]

    def test_noise_files(self, tmp_path):
        samples = [NoiseSample(0, 0.1, 0.09, 0.02), NoiseSample(2, 0.1, 0.12, 0.03)]
        excl = [Exclusion(1, 0.1, "contract", "trace is 2")]
        csv_store.write_noise(tmp_path, samples, summarize(samples), excl)
        assert len(csv_store.read_csv(tmp_path / csv_store.NOISE_SAMPLES_CSV)) == 2
        summary = csv_store.read_csv(tmp_path / csv_store.NOISE_SUMMARY_CSV)
        assert summary[0]["count"] == "2"
        assert csv_store.read_csv(tmp_path / csv_store.EXCLUSIONS_CSV)[0]["category"] == "contract"

    def test_json_is_sorted(self, tmp_path):
        csv_store.write_json(tmp_path / "m.json", {"b": 1, "a": 2})
        assert list(json.loads((tmp_path / "m.json").read_text())) == ["a", "b"]
