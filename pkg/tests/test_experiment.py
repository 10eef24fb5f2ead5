import json

import pytest

from app.core.config import settings
from app.core.errors import ConfigValidationError, RunStorageError, TrainingDivergedError
from app.db import csv_store
from app.schemas.experiment import validate_experiment
from app.services.experiment_runners.broken_path import gamma_dir_name
from app.services.experiment_service import apply_overrides, load_config, run_experiment
from app.services.results_service import collect_manifests, render_report

TRAINING_FILES = {"errors.csv", "schedule.csv", "schedule.json", "rho_series.csv", "spins.csv"}


def names(path):
    return {p.name for p in path.iterdir()}


class TestConfig:
    def test_every_violation_is_reported(self):
        with pytest.raises(ConfigValidationError) as info:
            validate_experiment({"kind": "anneal-train", "n": 0, "ramp": {"dt": -1.0}, "bogus": 1})
        text = "\n".join(info.value.violations)
        assert len(info.value.violations) >= 3
        assert "n:" in text and "ramp.dt" in text and "bogus" in text

    def test_kind_specific_rules(self):
        with pytest.raises(ConfigValidationError) as info:
            validate_experiment({"kind": "size-bootstrap", "n": 2, "target": "010"})
        assert len(info.value.violations) == 2

    def test_broken_path_needs_a_path(self):
        with pytest.raises(ConfigValidationError):
            validate_experiment({"kind": "broken-path", "n": 2})

    def test_grid_must_divide(self):
        with pytest.raises(ConfigValidationError):
            validate_experiment({"kind": "anneal-train", "ramp": {"t_f": 5.0, "dt": 2.0}})

    def test_presets_fill_unset_fields(self):
        cfg = validate_experiment({"kind": "broken-path", "n": 2, "path": {"family": "y", "n": 2}})
        t = cfg.resolved_training()
        assert t.max_epochs == 50
        assert t.eta_eps == 5e-6
        assert t.mask() == {"zeta": True, "eps": True, "kk": False}

    def test_explicit_values_win_over_preset(self):
        cfg = validate_experiment({"kind": "anneal-train", "training": {"max_epochs": 7}})
        assert cfg.resolved_training().max_epochs == 7

    def test_noise_defaults(self):
        cfg = validate_experiment({"kind": "noise-mc"})
        assert cfg.noise is not None
        assert cfg.noise.samples == 1000
        assert cfg.noise.magnitudes[0] == 0.02 and cfg.noise.magnitudes[-1] == 0.2

    def test_overrides(self):
        doc = apply_overrides({"training": {"eta_zeta": 1.0}}, {"training.max_epochs": 5, "n": None})
        assert doc == {"training": {"eta_zeta": 1.0, "max_epochs": 5}}
        with pytest.raises(ConfigValidationError):
            apply_overrides({"n": 2}, {"n.deep": 1})

    def test_load_config_errors(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigValidationError):
            load_config(bad)
        with pytest.raises(RunStorageError):
            load_config(tmp_path / "missing.json")

    def test_load_config_applies_defaults_and_overrides(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"n": 3, "training": {"max_epochs": 9}}))
        cfg = load_config(path, {"training.max_epochs": 2}, defaults={"kind": "monotone"})
        assert cfg.kind == "monotone"
        assert cfg.n == 3
        assert cfg.training.max_epochs == 2


class TestRuns:
    def test_anneal_train(self, small_run_doc):
        cfg = validate_experiment(small_run_doc("anneal-train"))
        manifest, target = run_experiment(cfg)
        assert names(target) == TRAINING_FILES | {"manifest.json"}
        rows = csv_store.read_csv(target / csv_store.ERRORS_CSV)
        assert [r["epoch"] for r in rows] == ["1", "2", "3"]
        assert manifest.epochs == 3
        assert manifest.rng.algorithm == "PCG64"
        doc = csv_store.read_json(target / csv_store.MANIFEST_JSON)
        assert doc["config"]["ramp"]["dt"] == 1.0
        assert doc["config"]["training"]["max_epochs"] == 3
        assert doc["config"]["training"]["trainable"] == {"zeta": True, "eps": False, "kk": False}
        assert doc["config"]["training"]["eta_increment"] is not None
        assert doc["versions"]["numpy"]

    def test_errors_csv_is_reproducible(self, small_run_doc, tmp_path):
        first = validate_experiment(small_run_doc("anneal-train", output_dir=str(tmp_path / "one")))
        second = validate_experiment(small_run_doc("anneal-train", output_dir=str(tmp_path / "two")))
        _, a = run_experiment(first)
        _, b = run_experiment(second)
        for name in ("errors.csv", "schedule.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_size_bootstrap_levels(self, small_run_doc):
        cfg = validate_experiment(small_run_doc("size-bootstrap", n=4))
        manifest, target = run_experiment(cfg)
        assert manifest.children == ["n2", "n3", "n4"]
        for child in manifest.children:
            assert TRAINING_FILES | {"manifest.json"} <= names(target / child)
        chain = manifest.summary["chain"]
        assert [c["n"] for c in chain] == [3, 4]
        assert all(c["scratch_initial_rms"] is not None for c in chain)

    def test_broken_path_legs(self, small_run_doc):
        doc = small_run_doc(
            "broken-path",
            path={"family": "y", "n": 2, "gamma_grid": [0.0, 0.5, 1.0]},
            next_legs=[{"family": "y_prime", "n": 2, "gamma_grid": [0.0, 1.0]}],
        )
        doc["training"]["max_epochs"] = 2
        manifest, target = run_experiment(validate_experiment(doc))
        assert manifest.children == ["leg1-y", "leg2-y_prime"]
        assert names(target / "leg1-y") >= {"spins.csv", "manifest.json", "gamma-0.0", "gamma-1.0"}
        assert names(target / "leg1-y" / "gamma-0.5") == {"errors.csv", "schedule.csv", "schedule.json"}
        spins = csv_store.read_csv(target / "leg1-y" / csv_store.SPINS_CSV)
        assert len(spins) == 3 * 2
        assert [float(r["gamma"]) for r in spins[::2]] == [0.0, 0.5, 1.0]
        assert {r["qubit"] for r in spins} == {"0", "1"}
        assert 0 < manifest.epochs <= 3 * 2 + 2 * 2

    def test_noise_mc(self, small_run_doc):
        doc = small_run_doc("noise-mc", noise={"samples": 8, "magnitudes": [0.05, 0.2]}, rng_seed=4)
        manifest, target = run_experiment(validate_experiment(doc))
        assert manifest.noise_mode == "complex-entrywise"
        assert manifest.children == ["trained"]
        assert {"noise_samples.csv", "noise_summary.csv", "exclusions.csv"} <= names(target)
        assert manifest.summary["samples"] + manifest.summary["excluded"] == 8

    def test_noise_mc_from_seed_schedule(self, small_run_doc, tmp_path):
        _, trained = run_experiment(validate_experiment(small_run_doc("anneal-train")))
        doc = small_run_doc(
            "noise-mc",
            noise={"samples": 4, "magnitudes": [0.1]},
            seed_schedule_file=str(trained),
            output_dir=str(tmp_path / "noise"),
        )
        doc["training"]["init_policy"] = "seed-schedule"
        manifest, target = run_experiment(validate_experiment(doc))
        assert manifest.children == []
        assert manifest.epochs == 0

    def test_seed_schedule_must_match_grid(self, small_run_doc, tmp_path):
        _, trained = run_experiment(validate_experiment(small_run_doc("anneal-train")))
        doc = small_run_doc("anneal-train", seed_schedule_file=str(trained), output_dir=str(tmp_path / "x"))
        doc["training"]["init_policy"] = "seed-schedule"
        doc["ramp"] = {"t_f": 6.0, "dt": 1.0, "beta_f": 0.5, "k0": 0.2}
        with pytest.raises(ConfigValidationError):
            run_experiment(validate_experiment(doc))
        assert not (tmp_path / "x").exists()

    def test_monotone(self, small_run_doc):
        doc = small_run_doc("monotone", anneal_steps=4)
        doc["training"]["eta_increment"] = 1e-3
        manifest, target = run_experiment(validate_experiment(doc))
        assert "sw.csv" in names(target)
        s_w = [float(r["s_w"]) for r in csv_store.read_csv(target / "sw.csv")]
        assert len(s_w) == 5
        assert all(b >= a for a, b in zip(s_w, s_w[1:]))
        assert manifest.summary["anneal_steps"] == 4

    def test_divergence_leaves_no_output(self, small_run_doc, tmp_path):
        doc = small_run_doc("anneal-train", output_dir=str(tmp_path / "boom"))
        doc["ramp"] = {"t_f": 2.0, "dt": 1.0, "beta_f": 1000.0, "k0": 2.0, "ramp_end_fraction": 1.0}
        with pytest.raises(TrainingDivergedError):
            run_experiment(validate_experiment(doc))
        assert list(tmp_path.iterdir()) == []

    def test_default_output_directory(self, small_run_doc, tmp_path, monkeypatch):
        monkeypatch.setattr(settings, "OUTPUT_DIR", str(tmp_path / "runs"))
        doc = small_run_doc("anneal-train")
        del doc["output_dir"]
        manifest, target = run_experiment(validate_experiment(doc))
        assert target.parent == tmp_path / "runs"
        assert target.name.startswith("anneal-train-n2-")
        assert manifest.config["output_dir"] == str(target)


def test_report_lists_runs_and_children(small_run_doc, tmp_path):
    run_experiment(validate_experiment(small_run_doc("size-bootstrap", n=3)))
    rows = collect_manifests(tmp_path)
    assert [r["run"] for r in rows] == ["run", "run/n2", "run/n3"]
    table = render_report(rows)
    assert table.splitlines()[0].split() == [
        "run", "kind", "n", "family", "epochs", "initial_rms", "final_rms", "wall_time_s"
    ]
    assert render_report([]) == "no runs found"


def test_gamma_dir_names_keep_close_values_apart():
    assert gamma_dir_name(0.1) != gamma_dir_name(0.10001)
    assert gamma_dir_name(0.25) == "gamma-0.25"
    assert gamma_dir_name(1) == "gamma-1.0"
