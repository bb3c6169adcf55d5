import json
import pathlib

import jsonschema
import pytest

import hmlab

SCHEMA = json.loads((pathlib.Path(__file__).resolve().parents[2] / "docs" / "report.schema.json").read_text())


def test_catalogue():
    names = [s["name"] for s in hmlab.list_scenarios()]
    assert len(names) >= 5
    assert {"flat_line", "point", "sine_graph", "polyline"} <= set(names)


def test_probability_report_matches_schema():
    rep = hmlab.run_experiment("probability", "point", {"poles": 2})
    jsonschema.validate(rep, SCHEMA)
    assert rep["pass"]
    assert rep["constants"]["row_sum_defect"]["h"] <= 1e-12


def test_same_seed_same_tables():
    a = hmlab.run_experiment("functionals", "flat_line", seed=3)
    b = hmlab.run_experiment("functionals", "flat_line", seed=3)
    assert a["tables"] == b["tables"]


def test_unknown_parameter_rejected():
    with pytest.raises(ValueError):
        hmlab.run_experiment("probability", "point", {"no_such_key": 1})


def test_validation_and_pipeline(tmp_path):
    bad = {"scenario": {"preset": "point", "boundary_dim": 1}}
    assert any("codimension" in e for e in hmlab.validate(bad))
    code, summary = hmlab.run({"scenario": "point", "output_dir": str(tmp_path)}, "solve")
    assert code == 0
    assert abs(summary["stages"]["solve"]["omega_total"] - 1) <= 1e-12
    assert (tmp_path / "run.json").exists()
