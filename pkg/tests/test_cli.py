"""End-to-end tests of the experiment CLI on small discretizations."""

import json

import numpy as np
import pytest

from src.cli import default_scene, load_manifest, main, read_matrix_csv
from src.config import Config
from src.geometry import save_scene

COARSE = ["--degree", "2"]


def _run(tmp_path, *args):
    return main(list(args) + COARSE + ["--out", str(tmp_path)])


def test_capmat_writes_matrices_and_manifest(tmp_path, capsys):
    assert _run(tmp_path, "capmat", "--dump-operator", str(tmp_path / "operator.npy")) == 0
    labels, C = read_matrix_csv(tmp_path / "capacitance.csv")
    assert labels == ["D1", "D2", "D3"]
    assert C.shape == (3, 3)
    labels, perturbed = read_matrix_csv(tmp_path / "perturbed_capacitance.csv")
    assert labels == ["D1", "D2", "D3", "Omega"]
    assert perturbed.shape == (4, 4)
    assert (tmp_path / "operator.npy").exists()

    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["discretization"]["max_degree"] == 2
    assert "capacitance.csv" in manifest["outputs"]
    assert str(tmp_path / "manifest.json") in capsys.readouterr().out


def test_scene_file_is_used(tmp_path):
    scene_path = save_scene(default_scene().without_defect(), tmp_path / "scene.json")
    assert _run(tmp_path, "capmat", "--scene", str(scene_path)) == 0
    assert not (tmp_path / "perturbed_capacitance.csv").exists()


def test_missing_scene_is_a_usage_error(tmp_path, capsys):
    missing = tmp_path / "absent.json"
    assert _run(tmp_path, "capmat", "--scene", str(missing)) == 2
    assert str(missing) in capsys.readouterr().err


def test_empty_radius_list_is_a_usage_error(tmp_path):
    assert _run(tmp_path, "sweep", "--radii", "") == 2


def test_defect_required(tmp_path):
    scene_path = save_scene(default_scene().without_defect(), tmp_path / "scene.json")
    assert _run(tmp_path, "expand", "--scene", str(scene_path)) == 2


def test_numerical_failure_exit_status(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(Config, "CONDITION_LIMIT", 1.0)
    assert _run(tmp_path, "capmat") == 1
    assert "condition" in capsys.readouterr().err


def test_spectrum(tmp_path):
    assert _run(tmp_path, "spectrum") == 0
    lines = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert lines[0] == "index,eigenvalue,resonance,condition,clustered"
    assert len(lines) == 4


def test_expand_with_truncation_report(tmp_path):
    assert _run(tmp_path, "expand", "--order", "2", "--report-truncation", "3") == 0
    terms = (tmp_path / "expansion_terms.csv").read_text().splitlines()
    assert len(terms) == 1 + 3
    labels, correction = read_matrix_csv(tmp_path / "correction.csv")
    assert correction.shape == (4, 4)
    assert len((tmp_path / "truncation.csv").read_text().splitlines()) == 1 + 3
    report = json.loads((tmp_path / "truncation.json").read_text())
    assert report["reference_ratio"] > 0
    assert "block_diagonal_error" in report


def test_sweep(tmp_path):
    assert _run(tmp_path, "sweep", "--radii", "1e-4,1e-3") == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0].split(",")[:2] == ["radius", "direct_1"]
    assert len(lines) == 3
    summary = json.loads((tmp_path / "sweep_summary.json").read_text())
    assert summary["kinds"] == ["simple"] * 3
    assert not summary["ep"]


def test_loss_map_minimum_at_truth(tmp_path):
    assert _run(tmp_path, "loss-map", "--grid", "2.8:3.2:3,0:0.2:3") == 0
    summary = json.loads((tmp_path / "loss_map.json").read_text())
    assert summary["truth"] == [3.0, 0.0]
    assert summary["minimum"]["x"] == pytest.approx(3.0)
    assert summary["minimum"]["y"] == pytest.approx(0.0)
    assert summary["invalid_cells"] == 0
    assert len((tmp_path / "loss_map.csv").read_text().splitlines()) == 1 + 9


def test_sense_and_rerun(tmp_path):
    first = tmp_path / "first"
    args = ["sense", "--noise", "1e-3", "--draws", "2", "--grid", "2.9:3.1:2,0:0.1:2",
            "--iterations", "2"]
    assert _run(first, *args) == 0
    draws = (first / "draws.csv").read_text()
    assert len(draws.splitlines()) == 1 + 2
    summary = json.loads((first / "summary.json").read_text())
    assert summary["levels"][0]["draws"] == 2

    spec, scene = load_manifest(first / "manifest.json")
    assert spec.subcommand == "sense"
    assert scene == default_scene()

    second = tmp_path / "second"
    assert main(["rerun", str(first / "manifest.json"), "--out", str(second)]) == 0
    assert (second / "draws.csv").read_text() == draws


def test_bad_manifest(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text("{}")
    assert main(["rerun", str(path)]) == 2


def test_rerun_applies_recorded_settings(tmp_path, monkeypatch):
    first, second, fresh = tmp_path / "first", tmp_path / "second", tmp_path / "fresh"
    monkeypatch.setattr(Config, "QUADRATURE_ORDER", 9)
    assert _run(first, "capmat") == 0
    manifest = json.loads((first / "manifest.json").read_text())
    assert manifest["discretization"]["quadrature_order"] == 9
    assert manifest["spec"]["settings"]["FD_STEP"] == Config.FD_STEP
    assert manifest["spec"]["settings"]["EP_GAP_TOLERANCE"] == Config.EP_GAP_TOLERANCE

    monkeypatch.setattr(Config, "QUADRATURE_ORDER", 0)
    assert main(["rerun", str(first / "manifest.json"), "--out", str(second)]) == 0
    assert Config.QUADRATURE_ORDER == 0
    rerun = json.loads((second / "manifest.json").read_text())
    assert rerun["discretization"]["quadrature_order"] == 9
    assert (second / "perturbed_capacitance.csv").read_bytes() == (
        first / "perturbed_capacitance.csv"
    ).read_bytes()

    assert _run(fresh, "capmat") == 0
    manifest = json.loads((fresh / "manifest.json").read_text())
    assert manifest["discretization"]["quadrature_order"] == 6


def test_unknown_recorded_setting_is_a_usage_error(tmp_path):
    assert _run(tmp_path, "capmat") == 0
    path = tmp_path / "manifest.json"
    manifest = json.loads(path.read_text())
    manifest["spec"]["settings"]["WAVE_NUMBER"] = 1.0
    path.write_text(json.dumps(manifest))
    assert main(["rerun", str(path), "--out", str(tmp_path / "again")]) == 2


def test_negative_expansion_order_is_a_usage_error(tmp_path, capsys):
    assert _run(tmp_path, "expand", "--order", "-1") == 2
    assert "--order" in capsys.readouterr().err


def test_linear_algebra_failure_exit_status(tmp_path, monkeypatch):
    def singular(*args, **kwargs):
        raise np.linalg.LinAlgError("Singular matrix")

    monkeypatch.setattr("src.cli.experiments.capacitance_matrix", singular)
    assert _run(tmp_path, "capmat") == 1
