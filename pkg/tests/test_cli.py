import json

import pytest

from app import __version__
from app.main import main


@pytest.fixture
def config_file(tmp_path, small_run_doc):
    def write(kind="anneal-train", **extra):
        doc = small_run_doc(kind, **extra)
        doc.pop("output_dir")
        path = tmp_path / f"{kind}.json"
        path.write_text(json.dumps(doc))
        return path

    return write


def test_train_writes_run(config_file, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["train", "--config", str(config_file()), "--out", str(out), "--epochs", "2", "--quiet"])
    assert code == 0
    assert (out / "manifest.json").exists()
    assert len((out / "errors.csv").read_text().splitlines()) == 3
    assert str(out) in capsys.readouterr().out


def test_verb_sets_kind(config_file, tmp_path):
    out = tmp_path / "out"
    path = config_file("anneal-train", anneal_steps=3)
    assert main(["monotone", "--config", str(path), "--out", str(out), "--quiet"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["kind"] == "monotone"
    assert (out / "sw.csv").exists()


def test_invalid_config_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 0, "ramp": {"dt": -1}}))
    assert main(["train", "--config", str(path), "--out", str(tmp_path / "o"), "--quiet"]) == 2
    assert "error:" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_unknown_preset_exits_2(config_file, tmp_path):
    argv = ["train", "--config", str(config_file()), "--preset", "nope", "--out", str(tmp_path / "o")]
    assert main(argv + ["--quiet"]) == 2


def test_divergence_exits_3(config_file, tmp_path):
    path = config_file(ramp={"t_f": 2.0, "dt": 1.0, "beta_f": 1000.0, "k0": 2.0, "ramp_end_fraction": 1.0})
    assert main(["train", "--config", str(path), "--out", str(tmp_path / "o"), "--quiet"]) == 3
    assert not (tmp_path / "o").exists()


def test_occupied_output_exits_4(config_file, tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    (out / "keep.txt").write_text("x")
    assert main(["train", "--config", str(config_file()), "--out", str(out), "--quiet"]) == 4
    assert [p.name for p in out.iterdir()] == ["keep.txt"]


def test_missing_config_exits_4(tmp_path):
    assert main(["train", "--config", str(tmp_path / "none.json"), "--quiet"]) == 4


def test_report(config_file, tmp_path, capsys):
    out = tmp_path / "runs" / "a"
    assert main(["train", "--config", str(config_file()), "--out", str(out), "--quiet"]) == 0
    capsys.readouterr()
    assert main(["report", str(tmp_path / "runs"), "--quiet"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split()[0] == "run"
    assert lines[2].split()[:3] == ["a", "anneal-train", "2"]


def test_report_empty(tmp_path, capsys):
    assert main(["report", str(tmp_path)]) == 0
    assert capsys.readouterr().out.strip() == "no runs found"


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_verb_is_required():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
