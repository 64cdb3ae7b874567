"""CLI round trips, exit codes, file formats, and determinism."""

import json
import math

import numpy as np
import pytest

import cobsig as cs
from cobsig.cli import dispatch
from cobsig.fileio import (load_correspondence, load_signal,
                           save_correspondence, save_signal)
from cobsig.signalops import make_correspondence


def run(capsys, *argv):
    code = dispatch(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- file round trips --------------------------------------------------------


def test_signal_file_round_trip(tmp_path, square8):
    path = tmp_path / "sq.json"
    save_signal(square8, path)
    back = load_signal(path)
    assert back.complex == square8.complex
    assert np.array_equal(back.metric.lengths, square8.metric.lengths)
    assert back.hints == square8.hints


def test_deformed_metric_round_trip(tmp_path, square8):
    spec = cs.NoiseSpec(cs.vertex_at(square8, (0.75, 0.5)), 0.1, 0.2, 0.25)
    noisy = cs.apply_noise(square8, spec)
    path = tmp_path / "noisy.json"
    save_signal(noisy, path)
    back = load_signal(path)
    assert np.array_equal(back.metric.lengths, noisy.metric.lengths)
    assert back.metric.source == "deformed"


def test_correspondence_round_trip(tmp_path):
    lower = cs.gen_rectangle(1.0, 1.0, 4)
    upper = cs.gen_rectangle(1.0, 1.0, 4, origin=(0.0, 1.0))
    corr = make_correspondence(lower, upper)
    path = tmp_path / "corr.json"
    save_correspondence(corr, path)
    assert load_correspondence(path) == corr


# -- subcommands -------------------------------------------------------------


def test_generate_validate_energy_pipeline(tmp_path, capsys):
    mesh = str(tmp_path / "sq.json")
    code, _, _ = run(capsys, "generate", "--kind", "square",
                     "--resolution", "16", "--out", mesh)
    assert code == 0
    code, out, _ = run(capsys, "validate", mesh)
    assert code == 0
    assert json.loads(out)["ok"] is True
    code, out, _ = run(capsys, "energy", mesh)
    assert code == 0
    payload = json.loads(out)
    assert payload["E"] == pytest.approx(0.5, rel=0.02)
    assert payload["steiner_level"] == 2
    assert payload["resolution"] == 16.0


def test_cli_fourier(tmp_path, capsys):
    mesh = str(tmp_path / "sq.json")
    run(capsys, "generate", "--kind", "square", "--resolution", "8",
        "--out", mesh)
    out_mesh = str(tmp_path / "sqF.json")
    code, out, _ = run(capsys, "fourier", mesh, "--transformed-out", out_mesh)
    assert code == 0
    relabeled = load_signal(out_mesh)
    original = load_signal(mesh)
    assert relabeled.complex.labels["A"] == original.complex.labels["X"]


def test_cli_verify_thm1_exit_zero(tmp_path, capsys):
    mesh = str(tmp_path / "sq.json")
    run(capsys, "generate", "--kind", "square", "--resolution", "16",
        "--out", mesh)
    code, out, _ = run(capsys, "verify-thm1", mesh)
    assert code == 0
    assert json.loads(out)["holds"] is True


def test_cli_noise_filter(tmp_path, capsys):
    mesh = str(tmp_path / "sq.json")
    run(capsys, "generate", "--kind", "square", "--resolution", "16",
        "--out", mesh)
    sig = load_signal(mesh)
    p = cs.vertex_at(sig, (0.75, 0.5))
    noisy = str(tmp_path / "noisy.json")
    code, out, _ = run(capsys, "noise", mesh, "--center-vertex", str(p),
                       "--delta0", "0.1", "--delta", "0.2",
                       "--epsilon", "0.25", "--out", noisy)
    assert code == 0
    keep = tmp_path / "keep.json"
    keep.write_text(json.dumps({"axis": 0, "max": 0.5}))
    filt = str(tmp_path / "filt.json")
    code, out, _ = run(capsys, "filter", mesh, "--keep", str(keep),
                       "--out", filt)
    assert code == 0
    assert json.loads(out)["E"] == pytest.approx(0.125, rel=0.03)


def test_cli_compose_and_verify_thm2(tmp_path, capsys):
    lower = cs.gen_rectangle(1.0, 1.0, 8)
    upper = cs.gen_rectangle(1.0, 1.0, 8, origin=(0.0, 1.0))
    lpath, rpath = str(tmp_path / "l.json"), str(tmp_path / "r.json")
    save_signal(lower, lpath)
    save_signal(upper, rpath)
    corr = make_correspondence(lower, upper)
    cpath = str(tmp_path / "corr.json")
    save_correspondence(corr, cpath)

    out_mesh = str(tmp_path / "glued.json")
    code, out, _ = run(capsys, "compose", "--left", lpath, "--right", rpath,
                       "--corr", cpath, "--out", out_mesh)
    assert code == 0
    assert json.loads(out)["E"] == pytest.approx(1.0, rel=0.03)

    code, out, _ = run(capsys, "verify-thm2", "--left", lpath, "--right",
                       rpath, "--corr", cpath)
    assert code == 0
    assert json.loads(out)["holds"] is True


def test_cli_sweep_and_study_and_oracle(tmp_path, capsys):
    mesh = str(tmp_path / "sq.json")
    run(capsys, "generate", "--kind", "square", "--resolution", "16",
        "--out", mesh)
    sig = load_signal(mesh)
    p = cs.vertex_at(sig, (0.75, 0.5))
    code, out, _ = run(capsys, "sweep-eps", mesh, "--center-vertex", str(p),
                       "--delta0", "0.1", "--delta", "0.2",
                       "--eps", "0.4,0.2")
    assert code == 0
    assert len(json.loads(out)["rows"]) == 2

    code, out, _ = run(capsys, "refine-study", "--kind", "square",
                       "--resolutions", "4,8", "--oracle-resolution", "128")
    assert code == 0
    assert len(json.loads(out)["rows"]) == 2

    code, out, _ = run(capsys, "oracle", "--kind", "square",
                       "--fine-resolution", "256")
    assert code == 0
    assert json.loads(out)["E"] == pytest.approx(0.5, abs=1e-3)


def test_cli_csv_format(tmp_path, capsys):
    mesh = str(tmp_path / "sq.json")
    run(capsys, "generate", "--kind", "square", "--resolution", "8",
        "--out", mesh)
    code, out, _ = run(capsys, "energy", mesh, "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("E,EF,ratio")
    assert len(lines) == 2


# -- exit codes and determinism ----------------------------------------------


def test_cli_missing_file_exits_2(capsys):
    code, _, err = run(capsys, "energy", "/nonexistent/mesh.json")
    assert code == 2
    assert "cannot read" in err


def test_cli_unknown_command_exits_2(capsys):
    assert run(capsys, "frobnicate")[0] == 2


def test_cli_bad_parameters_exit_2(tmp_path, capsys):
    mesh = str(tmp_path / "sq.json")
    run(capsys, "generate", "--kind", "square", "--resolution", "8",
        "--out", mesh)
    code, _, err = run(capsys, "sweep-eps", mesh, "--center-vertex", "0",
                       "--delta0", "0.3", "--delta", "0.2", "--eps", "0.4")
    assert code == 2
    code, _, err = run(capsys, "generate", "--kind", "square",
                       "--resolution", "1", "--out", str(tmp_path / "x.json"))
    assert code == 2


def test_cli_validation_failure_exits_1(tmp_path, capsys):
    from cobsig.fileio import signal_to_dict
    mesh = tmp_path / "bad.json"
    data = signal_to_dict(cs.gen_square(4))
    data["labels"]["B"] = []
    mesh.write_text(json.dumps(data))
    code, out, _ = run(capsys, "validate", str(mesh))
    assert code == 1
    assert json.loads(out)["ok"] is False


def test_cli_byte_identical_reports(tmp_path, capsys):
    mesh = str(tmp_path / "sq.json")
    run(capsys, "generate", "--kind", "square", "--resolution", "16",
        "--out", mesh)
    first = run(capsys, "verify-thm1", mesh)
    second = run(capsys, "verify-thm1", mesh)
    assert first == second

    mesh2 = str(tmp_path / "sq2.json")
    run(capsys, "generate", "--kind", "square", "--resolution", "16",
        "--out", mesh2)
    assert open(mesh).read() == open(mesh2).read()


def test_load_rejects_metric_edge_mismatch(tmp_path):
    from cobsig.errors import CobsigError
    from cobsig.fileio import signal_to_dict
    data = signal_to_dict(cs.gen_square(2), include_metric=True)
    data["metric"] = data["metric"][:-1]  # drop one edge
    path = tmp_path / "bad_metric.json"
    path.write_text(json.dumps(data))
    with pytest.raises(CobsigError):
        load_signal(path)


def test_cli_unbuildable_mesh_exits_1(tmp_path, capsys):
    from cobsig.fileio import signal_to_dict
    data = signal_to_dict(cs.gen_square(2))
    data["labels"]["A"] = [[0, 8]]  # not a facet of the complex
    mesh = tmp_path / "broken.json"
    mesh.write_text(json.dumps(data))
    code, out, _ = run(capsys, "validate", str(mesh))
    assert code == 1
    assert json.loads(out)["ok"] is False
