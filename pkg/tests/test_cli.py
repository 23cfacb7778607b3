import json

import pytest

from sfgsynth.cli import main
from sfgsynth.circuits import load_circuit


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def value(out, key):
    for line in out.splitlines():
        parts = line.split()
        if parts and parts[0] == key:
            return parts[1]
    raise KeyError(key)


def test_gate_reports_time_and_geometry(capsys):
    code, out, _ = run(capsys, "gate", "73", "82", "--J", "61.175")
    assert code == 0
    assert float(value(out, "T_ns")) == pytest.approx(1.308, abs=0.002)
    weyl = next(line.split()[1:] for line in out.splitlines() if line.startswith("weyl"))
    assert [float(x) for x in weyl] == pytest.approx([1.224, 1.224, 0.0905], abs=1e-3)
    assert "perfect_entangler" in out and "G2" in out


def test_gate_cp_like(capsys):
    code, out, _ = run(capsys, "gate", "124", "142", "--J", "51.93")
    assert code == 0 and float(value(out, "AF_vs_CP")) > 0.99


def test_gate_degenerate_is_usage_error(capsys):
    code, _, err = run(capsys, "gate", "1", "1")
    assert code == 2 and "degenerate" in err


def test_bad_arguments(capsys):
    assert run(capsys, "gate", "x", "2")[0] == 2
    assert run(capsys, "nonsense")[0] == 2


def test_sweep_outputs(capsys, tmp_path):
    out_csv = tmp_path / "s.csv"
    code, out, _ = run(capsys, "sweep", "10", "--out", str(out_csv))
    assert code == 0 and int(value(out, "gates")) > 0
    assert out_csv.read_text().startswith("M,N,branch")
    code, out, _ = run(capsys, "sweep", "1")
    assert int(value(out, "gates")) == 0


def test_search_modes(capsys, tmp_path):
    code, out, _ = run(capsys, "search", "--fast", "--J", "61.175", "--B", "0.136")
    assert code == 0 and out.splitlines()[1].startswith("73,82,")
    csv_path = tmp_path / "cp.csv"
    code, out, _ = run(capsys, "search", "--cp", "--B", "0.136", "--Tmax", "10", "--out", str(csv_path))
    assert code == 0 and any(line.startswith("124,142,") for line in csv_path.read_text().splitlines())
    assert run(capsys, "search", "--cp", "--B", "-0.1")[0] == 2
    assert run(capsys, "search", "--cp", "--af-min", "1.0")[0] == 1


def test_verify_catalog(capsys, tmp_path):
    code, out, _ = run(capsys, "verify-catalog")
    assert code == 0
    assert "histogram 0:7 1:12 2:12 3:4" in out
    assert out.count("PASS") == 35
    bad = tmp_path / "bad.txt"
    bad.write_text("0F R2z(pi)\n")
    assert run(capsys, "verify-catalog", "--corpus", str(bad))[0] == 2
    wrong = tmp_path / "wrong.txt"
    wrong.write_text("0F: R1z(pi)\n")
    code, out, _ = run(capsys, "verify-catalog", "--corpus", str(wrong))
    assert code == 1 and "FAIL" in out


def test_dj_commands(capsys):
    code, out, _ = run(capsys, "dj", "17")
    assert code == 0 and value(out, "classification") == "balanced" and float(value(out, "p000")) < 1e-12
    code, out, _ = run(capsys, "dj", "constant")
    assert value(out, "classification") == "constant" and float(value(out, "p000")) == pytest.approx(1.0)
    assert run(capsys, "dj", "FF")[0] == 2


def test_dj_with_shipped_circuit(capsys):
    from importlib import resources
    path = resources.files("sfgsynth").joinpath("data/u17_fast_cp.circ")
    code, out, _ = run(capsys, "dj", "17", "--circuit", str(path))
    assert code == 0
    assert float(value(out, "fidelity")) == pytest.approx(0.987, abs=0.003)
    assert float(value(out, "time_ns")) == pytest.approx(8.17, abs=0.05)


def test_reps_diagnostic(capsys):
    code, out, _ = run(capsys, "reps", "73", "82", "4")
    assert code == 0 and "match" in out


def test_catalog_export(capsys, tmp_path):
    path = tmp_path / "cat.csv"
    assert run(capsys, "catalog", "--out", str(path))[0] == 0
    assert len(path.read_text().strip().splitlines()) == 36


def test_synthesize_deterministic_with_report(capsys, tmp_path):
    outs = []
    for i in range(2):
        circ = tmp_path / f"best{i}.circ"
        rep = tmp_path / f"r{i}.json"
        code, out, _ = run(capsys, "--report", str(rep), "synthesize", "17", "--seed", "4", "--pop", "50",
                           "--generations", "20", "--out", str(circ))
        assert code == 0
        outs.append((circ.read_text(), (tmp_path / f"best{i}.history.csv").read_text(), out))
        data = json.loads(rep.read_text())
        assert data["seed"] == 4 and 0 <= data["outputs"]["af"] <= 1
    assert outs[0] == outs[1]
    assert float(value(outs[0][2], "af")) == pytest.approx(1.0)
    assert load_circuit(tmp_path / "best0.circ").two_qubit_count <= 3


def test_synthesize_with_config_and_sfg_library(capsys, tmp_path):
    cfg = tmp_path / "gp.cfg"
    cfg.write_text("PopL = 60\nmax_generations = 10\nangle_mode = continuous\ngate_library = fast_cp\n")
    code, out, _ = run(capsys, "synthesize", "17", "--config", str(cfg), "--seed", "2",
                       "--out", str(tmp_path / "b.circ"))
    assert code == 0 and float(value(out, "time_ns")) >= 0
    bad = tmp_path / "bad.cfg"
    bad.write_text("PopSize = 10\n")
    code, _, err = run(capsys, "synthesize", "17", "--config", str(bad))
    assert code == 2 and "PopSize" in err


def test_synthesize_circuit_target(capsys, tmp_path):
    from importlib import resources
    path = resources.files("sfgsynth").joinpath("data/u17_fast_cp.circ")
    code, out, _ = run(capsys, "synthesize", str(path), "--seed", "1", "--pop", "20", "--generations", "3",
                       "--out", str(tmp_path / "c.circ"))
    assert code == 0 and 0 <= float(value(out, "af")) <= 1
