import json
import subprocess
import sys

import numpy as np
import pytest

from holoretract.cli import main, render, run
from holoretract.fixtures import COUNTEREXAMPLE_L, parabola_map
from holoretract.norms import Euclidean, Sup
from holoretract.serialize import map_to_json, matrix_to_json, norm_to_json, vector_to_json


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def problem(L, src, dst):
    return {"L": matrix_to_json(L), "source_norm": norm_to_json(src), "target_norm": norm_to_json(dst)}


def test_metric_reports_norm(tmp_path):
    path = write(tmp_path, "m.json", {"norm": norm_to_json(Sup(2)), "vector": vector_to_json([1, 0.5])})
    code, rep = run("metric", path)
    assert code == 0
    assert rep["caratheodory"] == 1.0 and rep["kobayashi"] == 1.0
    assert rep["settings"]["tol"] == 1e-6 and rep["settings"]["seed"] == 0


def test_metric_at_interior_point(tmp_path):
    path = write(tmp_path, "m.json", {"norm": norm_to_json(Sup(1)), "vector": vector_to_json([1]),
                                      "point": vector_to_json([0.5])})
    code, rep = run("metric", path)
    assert code == 0 and rep["caratheodory"] == pytest.approx(4 / 3)


def test_check_isometry_exit_codes(tmp_path):
    bad = write(tmp_path, "bad.json", problem(COUNTEREXAMPLE_L, Sup(2), Sup(3)))
    code, rep = run("check-isometry", bad)
    assert code == 1 and rep["isometry"]["witness"] == [[1.0, 0.0], [1.0, 0.0]]
    good = write(tmp_path, "good.json", problem(np.array([[1], [0.5]]), Sup(1), Sup(2)))
    assert run("check-isometry", good)[0] == 0


def test_find_projection_c0_with_cross_check(tmp_path):
    L = np.array([[0, 1j], [1, 0], [0, 0]])
    path = write(tmp_path, "p.json", problem(L, Sup(2), Sup(3)))
    code, rep = run("find-projection", path)
    assert code == 0
    assert rep["projection"]["method"] == "c0"
    assert rep["projection"]["norm_certificate"]["value"] == 1.0
    assert rep["cross_check"]["norm_certificate"]["upper"] <= 1 + 1e-6


def test_find_projection_hilbert(tmp_path):
    L = np.array([[1], [1]]) / np.sqrt(2)
    code, rep = run("find-projection", write(tmp_path, "h.json", problem(L, Sup(1), Euclidean(2))))
    assert code == 0 and rep["projection"]["method"] == "hilbert"


def test_min_projection_norm_command(tmp_path):
    path = write(tmp_path, "mp.json", {"L": matrix_to_json(COUNTEREXAMPLE_L),
                                       "target_norm": norm_to_json(Sup(3))})
    code, rep = run("min-projection-norm", path)
    assert code == 1
    assert rep["min_projection"]["lower"] > 1.01
    path = write(tmp_path, "mp1.json", {"range_basis": [vector_to_json([1, 0])],
                                        "target_norm": norm_to_json(Sup(2))})
    assert run("min-projection-norm", path)[0] == 0


def test_retract_parabola(tmp_path):
    path = write(tmp_path, "r.json", {"f": map_to_json(parabola_map()),
                                      "source_norm": norm_to_json(Sup(1)),
                                      "target_norm": norm_to_json(Sup(2))})
    code, rep = run("retract", path)
    assert code == 0
    assert max(rep["retraction"]["verification"]["residuals"].values()) <= 1e-8


def test_counterexample_command():
    code, rep = run("counterexample")
    assert code == 1
    assert rep["no_norm_one_projection"] is True
    assert rep["step_c_contradiction"] is True


def test_corollary_demo_command():
    code, rep = run("corollary-demo")
    assert code == 0
    assert max(rep["original_residuals"].values()) <= 1e-7


@pytest.mark.parametrize("payload, command", [
    ("not json", "metric"),
    ({"vector": [[1, 0]]}, "metric"),
    ({"norm": {"kind": "sup", "dim": 2}, "vector": [[1, 0]]}, "metric"),
    ({"L": [[[1, 0]]], "source_norm": {"kind": "sup", "dim": 2},
      "target_norm": {"kind": "sup", "dim": 1}}, "check-isometry"),
    ({"norm": {"kind": "banana", "dim": 2}, "vector": [[1, 0], [0, 0]]}, "metric"),
])
def test_invalid_input_exit_2(tmp_path, payload, command):
    p = tmp_path / "x.json"
    p.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    code, rep = run(command, str(p))
    assert code == 2
    assert "error" in rep


def test_missing_file_exit_2(tmp_path):
    assert run("metric", str(tmp_path / "nope.json"))[0] == 2
    assert run("metric", None)[0] == 2


def test_numerical_failure_exit_3(tmp_path):
    # a budget of one LP iteration cannot close the bracket
    path = write(tmp_path, "mp.json", {"L": matrix_to_json(COUNTEREXAMPLE_L),
                                       "target_norm": norm_to_json(Sup(3))})
    code, rep = run("min-projection-norm", path, budget=1)
    assert code == 3
    assert rep["error"] == "NumericalFailure"
    assert rep["lower"] <= rep["upper"]


def test_reports_are_deterministic(tmp_path, capsys):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["counterexample", "--seed", "3", "--out", str(out1)]) == 1
    assert main(["counterexample", "--seed", "3", "--out", str(out2)]) == 1
    a, b = json.loads(out1.read_text()), json.loads(out2.read_text())
    assert set(a) == {"envelope", "report"}
    assert json.dumps(a["report"], sort_keys=True) == json.dumps(b["report"], sort_keys=True)
    assert a["report"]["settings"]["seed"] == 3
    # byte-identical once the envelope is fixed
    assert render(a["report"], timestamp="t") == render(b["report"], timestamp="t")


def test_text_format_is_derived_from_json():
    code, rep = run("counterexample")
    text = render(rep, "text")
    assert "no_norm_one_projection: true" in text
    assert "exit_code: 1" in text


def test_console_entry_point(tmp_path):
    path = write(tmp_path, "m.json", {"norm": norm_to_json(Sup(2)), "vector": vector_to_json([1, 0.5])})
    proc = subprocess.run([sys.executable, "-m", "holoretract", "metric", path],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["report"]["caratheodory"] == 1.0
    proc = subprocess.run([sys.executable, "-m", "holoretract", "metric", "-"],
                          input=json.dumps({"norm": norm_to_json(Euclidean(2)),
                                            "vector": vector_to_json([3, 4j])}),
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["report"]["caratheodory"] == 5.0
