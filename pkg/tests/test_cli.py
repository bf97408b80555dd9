"""Command-line behavior: verbs, exit codes, CSV schema stability."""

import json
import subprocess
import sys

import numpy as np
import pytest

from c0ops.cli import main
from c0ops.inner import monomial
from c0ops.jordan import random_invariant_subspace
from c0ops.subspaces import AmbientSpace

Z2 = {"zeros": [{"re": 0.0, "im": 0.0, "mult": 2}]}
Z1 = {"zeros": [{"re": 0.0, "im": 0.0, "mult": 1}]}


@pytest.fixture
def subspace_files(tmp_path):
    amb = AmbientSpace.build(monomial(2), 4)
    rng = np.random.default_rng(12)
    paths = []
    for name in ("m1", "m2"):
        m = random_invariant_subspace(amb, rng)
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(m.to_dict()))
        paths.append(str(p))
    return paths


def test_jordan_model_ok(subspace_files, capsys):
    rc = main(["jordan-model", "--input", subspace_files[0]])
    out = capsys.readouterr().out
    assert rc == 0
    assert "restriction model" in out and "compression model" in out


def test_jordan_model_parse_error(tmp_path, capsys):
    missing = str(tmp_path / "missing.json")
    assert main(["jordan-model", "--input", missing]) == 2


def test_jordan_model_invariance_error(tmp_path, capsys):
    amb = AmbientSpace.build(monomial(2), 1)
    data = {
        "ambient": {"theta": Z2, "copies": 1},
        "frame": [[1.0, 0.0], [0.0, 0.0]],  # span{1}: not invariant
    }
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(data))
    assert main(["jordan-model", "--input", str(p)]) == 3


def test_verify_orbit_self(subspace_files, capsys, tmp_path):
    out_path = str(tmp_path / "report.json")
    rc = main(
        ["verify-orbit", "--input", subspace_files[0], subspace_files[0], "--out", out_path]
    )
    assert rc == 0
    report = json.loads(open(out_path).read())
    assert report["verdict"] == "orbit"
    assert report["restriction_models_equal"] is True


def density_config(tmp_path, **overrides):
    cfg = {
        "theta": Z2,
        "copies": 12,
        "schedule": {"kind": "factorial"},
        "phi_all": Z1,
        "psi1": Z2,
        "psi2": Z1,
        "seed": 5,
    }
    cfg.update(overrides)
    p = tmp_path / "density.json"
    p.write_text(json.dumps(cfg))
    return str(p)


def test_density_sweep_csv_schema(tmp_path, capsys):
    rc = main(["density-sweep", "--config", density_config(tmp_path)])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "m,residual,bound,sigma_min,intertwine,K"
    assert len(lines) == 12  # header + m = 1..11
    first = lines[1].split(",")
    assert first[0] == "1"
    # K(1) = 1 exactly for the factorial schedule
    assert first[5] == "1"
    for line in lines[1:]:
        cells = line.split(",")
        assert len(cells) == 6
        assert float(cells[1]) <= float(cells[2]) + 1e-9


def test_density_sweep_golden_k_column(tmp_path, capsys):
    # the K column is pure arithmetic on the schedule: frozen as strings
    rc = main(["density-sweep", "--config", density_config(tmp_path)])
    out = capsys.readouterr().out
    ks = [line.split(",")[5] for line in out.strip().splitlines()[1:]]
    assert ks[:5] == [
        "1",
        "0.707106781187",
        "0.408248290464",
        "0.270030862434",
        "0.207163381578",
    ]


def test_density_sweep_hypothesis_exit(tmp_path, capsys):
    bad = density_config(tmp_path, psi1=Z1, psi2=Z2)  # psi2 does not divide psi1
    assert main(["density-sweep", "--config", bad]) == 4


def test_density_sweep_divergent_schedule_warns(tmp_path, capsys):
    cfg = density_config(
        tmp_path,
        schedule={"kind": "custom", "values": [(n + 1) ** -2 for n in range(13)]},
    )
    rc = main(["density-sweep", "--config", cfg])
    err = capsys.readouterr().err
    assert rc == 0
    assert "schedule warning" in err


def test_counterexample_witness_and_control(tmp_path, capsys):
    cfg = tmp_path / "ce.json"
    cfg.write_text(json.dumps({"blocks": [2, 1], "grid_denominator": 8}))
    assert main(["counterexample", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "witness found" in out

    ctrl = tmp_path / "ctrl.json"
    ctrl.write_text(json.dumps({"blocks": [1, 1], "grid_denominator": 4}))
    assert main(["counterexample", "--config", str(ctrl)]) == 0
    out = capsys.readouterr().out
    assert "no witness" in out


def test_counterexample_budget_exit(tmp_path, capsys):
    cfg = tmp_path / "ce.json"
    cfg.write_text(
        json.dumps({"blocks": [1, 1], "grid_denominator": 4, "budget": 2})
    )
    assert main(["counterexample", "--config", str(cfg)]) == 5


def test_cordiag_demo_agreement(tmp_path, capsys):
    cfg = tmp_path / "demo.json"
    cfg.write_text(
        json.dumps(
            {
                "theta": Z2,
                "copies": 4,
                "similarity": [[1.0, 0.3], [0.2, 1.5]],
                "pairs": 3,
                "seed": 11,
                "sweep": [8, 12],
            }
        )
    )
    assert main(["cordiag-demo", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "disagreements: 0 / 3" in out


def test_unknown_verb_is_parse_error(capsys):
    assert main(["no-such-verb"]) == 2


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "c0ops.cli", "jordan-model", "--input", "/nonexistent"],
        capture_output=True,
    )
    assert proc.returncode == 2
