import json
import subprocess
import sys
from importlib.resources import files

import numpy as np
import pytest

from anomaly.cli import main
from anomaly.report import Report, from_pairs, jsonable, lower_bound_residual, to_pairs
from anomaly.sampling import random_chain
from anomaly.scenario import (
    ScenarioError,
    bordism_to_json,
    lagrangian_to_json,
    load_scenario,
    parse_scenario,
    write_scenario,
)
from anomaly.toy import circle_three_pieces

SCENARIOS = files("anomaly") / "scenarios"
BUNDLED = sorted(p.name for p in SCENARIOS.iterdir() if p.name.endswith(".json"))
PLANE = {"dim": 2, "conj_matrix": [[1, 0], [0, 1]]}
ZERO = {"dim": 0, "conj_matrix": []}
# one column (1, i) written with [re, im] entries
ISO_FRAME = [[[1, 0]], [[0, 1]]]


def _scenario(**over):
    data = {
        "version": "anomaly-scenario/1",
        "spaces": {"W0": ZERO, "W1": PLANE, "W2": ZERO},
        "lagrangians": [
            {"name": "L01", "source": "W0", "target": "W1", "frame": ISO_FRAME},
            {"name": "L12", "source": "W1", "target": "W2", "frame": ISO_FRAME},
        ],
    }
    data.update(over)
    return data


def _write(tmp_path, data, name="s.json"):
    p = tmp_path / name
    p.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(p)


def test_bundled_scenarios_exist():
    assert {"anomaly_zero_boundary.json", "forced_triple.json", "real_unitary_pair.json",
            "toy_circle_three_arcs.json"} <= set(BUNDLED)


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_scenarios_pass(name, tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["glue", str(SCENARIOS / name), "--report", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["status"] == "pass"
    assert all(e["status"] == "pass" for e in rep["checks"])


def test_zero_boundary_scenario_reports_the_anomaly(capsys):
    assert main(["glue", str(SCENARIOS / "anomaly_zero_boundary.json")]) == 0
    assert "compose:L01*L12: dim K = 1" in capsys.readouterr().out


def test_handwritten_scenario(tmp_path, capsys):
    assert main(["glue", _write(tmp_path, _scenario())]) == 0
    assert "dim K = 1" in capsys.readouterr().out


@pytest.mark.parametrize(
    "data, fragment",
    [
        ("{not json", "line 1"),
        (_scenario(version="v0"), "$.version"),
        (_scenario(checks=["bogus"]), "$.checks[0]"),
        (_scenario(spaces={"W0": ZERO, "W1": {"dim": 2, "conj_matrix": [[2, 0], [0, 2]]}, "W2": ZERO}),
         "$.spaces.W1.conj_matrix"),
        (_scenario(lagrangians=[{"name": "L", "source": "W0", "target": "W9", "frame": []}]), "unknown space"),
        (_scenario(lagrangians=[
            {"name": "A", "source": "W0", "target": "W1", "frame": ISO_FRAME},
            {"name": "B", "source": "W0", "target": "W1", "frame": ISO_FRAME}]), "chain broken"),
        (_scenario(lagrangians=[{"name": "A", "source": "W0", "target": "W1", "frame": [[1, 0]]}]), "shape"),
        (_scenario(lagrangians=[]), "empty list"),
        (_scenario(bordisms=[]), "exactly one"),
    ],
    ids=["json", "version", "check", "conj", "space_ref", "chain", "shape", "empty", "both"],
)
def test_malformed_scenarios_exit_2(data, fragment, tmp_path, capsys):
    assert main(["glue", _write(tmp_path, data)]) == 2
    assert fragment in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path, capsys):
    assert main(["glue", str(tmp_path / "nope.json")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_non_lagrangian_frame_is_a_failing_check(tmp_path, capsys):
    data = _scenario(lagrangians=[
        {"name": "A", "source": "W0", "target": "W1", "frame": [[1], [0]]},
        {"name": "B", "source": "W1", "target": "W2", "frame": ISO_FRAME}])
    out = tmp_path / "r.json"
    assert main(["glue", _write(tmp_path, data), "--report", str(out)]) == 1
    rep = json.loads(out.read_text())
    assert rep["status"] == "fail"
    assert any(e["name"] == "lagrangian:A" and e["status"] == "fail" for e in rep["checks"])


def test_written_scenarios_round_trip(tmp_path, rng):
    spaces, rels = random_chain((2, 2, 2), rng)
    names = ["W0", "W1", "W2"]
    p = tmp_path / "chain.json"
    write_scenario(p, dict(zip(names, spaces)),
                   [lagrangian_to_json(f"L{i}{i + 1}", names[i], names[i + 1], r) for i, r in enumerate(rels)])
    sc = load_scenario(p)
    assert np.allclose(sc.spaces["W1"].conj_matrix, spaces[1].conj_matrix)
    assert main(["glue", str(p)]) == 0

    xs = circle_three_pieces(1, rng)
    q = tmp_path / "toy.json"
    write_scenario(q, bordisms=[bordism_to_json(n, x) for n, x in zip(("X01", "X12", "X23"), xs)])
    assert main(["glue", str(q)]) == 0


def test_parse_scenario_rejects_non_objects():
    with pytest.raises(ScenarioError):
        parse_scenario([])


def _verify(argv, tmp_path, name="r.json"):
    out = tmp_path / name
    code = main(["verify", *argv, "--report", str(out)])
    return code, json.loads(out.read_text())


def _strip_times(rep):
    for e in rep["checks"]:
        e.pop("wall_time")
    return rep


def test_verify_algebra_is_deterministic(tmp_path, capsys):
    c1, r1 = _verify(["algebra", "--cases", "2", "--seed", "5"], tmp_path, "a.json")
    c2, r2 = _verify(["algebra", "--cases", "2", "--seed", "5"], tmp_path, "b.json")
    assert c1 == c2 == 0
    assert _strip_times(r1) == _strip_times(r2)
    assert r1["global"]["seed"] == 5
    entry = r1["checks"][0]
    assert set(entry) >= {"name", "status", "max_residual", "tolerance", "metadata"}


def test_verify_small_gluing_passes(tmp_path, capsys):
    code, rep = _verify(["gluing", "--cases", "5", "--dim-max", "2"], tmp_path)
    assert code == 0 and rep["status"] == "pass"


def test_seed_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ANOMALY_SEED", "11")
    _, rep = _verify(["algebra", "--cases", "1"], tmp_path)
    assert rep["global"]["seed"] == 11
    monkeypatch.setenv("ANOMALY_SEED", "x")
    with pytest.raises(SystemExit):
        main(["verify", "algebra", "--cases", "1"])


@pytest.mark.parametrize("argv", [
    ["verify", "algebra", "--tol", "2"],
    ["verify", "algebra", "--cases", "0"],
    ["verify", "nosuch"],
    ["scan", "qalpha", "--alpha", "1", "--sizes", "4,x"],
    ["scan", "qalpha", "--alpha", "1", "--sizes", "0"],
])
def test_bad_arguments_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_scan_qalpha(tmp_path, capsys):
    out = tmp_path / "q.json"
    assert main(["scan", "qalpha", "--alpha", "1", "--sizes", "4,8,16", "--report", str(out)]) == 0
    text = capsys.readouterr().out
    assert "closedness_margin" in text and "2.589788e-02" in text
    rows = json.loads(out.read_text())["checks"][0]["metadata"]["table"]
    assert [r["N"] for r in rows] == [4, 8, 16]


def test_scan_qalpha_zero_is_an_error(capsys):
    assert main(["scan", "qalpha", "--alpha", "0", "--sizes", "4"]) == 2
    assert "alpha 0" in capsys.readouterr().err


def test_console_entry_point_runs():
    res = subprocess.run([sys.executable, "-m", "anomaly.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "verify" in res.stdout


def test_report_helpers():
    a = np.array([[1 + 2j, 0], [3, -1j]])
    assert np.array_equal(from_pairs(to_pairs(a), 2), a)
    assert from_pairs([[1, 2]], 2).shape == (1, 2)
    with pytest.raises(TypeError):
        from_pairs([[True]], 2)
    assert jsonable({"x": float("inf"), "z": 1j}) == {"x": None, "z": [0.0, 1.0]}
    assert lower_bound_residual(2.0, 1.0) == 0.5 and lower_bound_residual(0.0, 1.0) == float("inf")
    r = Report(seed=1)
    r.add("a", 1e-12, 1e-9)
    r.add("b", float("nan"), 1.0)
    assert [e["status"] for e in r.entries] == ["pass", "fail"]
    assert r.exit_code == 1
    assert json.loads(r.to_json())["checks"][1]["max_residual"] is None
