"""Canonical JSON envelope: rationals, round trips, exit derivation."""

import json
from fractions import Fraction

import pytest

from skrw.report import (DocumentError, dump_json, emit_parsed, emit_realization,
                         emit_structure, exit_status, format_rat, make_report,
                         parse_rat, parse_structure, render_human, sweep_csv,
                         to_jsonable)

F = Fraction


def test_rational_strings():
    assert format_rat(F(3)) == "3"
    assert format_rat(F(-2, 6)) == "-1/3"
    assert parse_rat("5") == F(5)
    assert parse_rat("-7/2") == F(-7, 2)
    assert parse_rat(" 4 / 6 ") == F(2, 3)
    assert parse_rat(12) == F(12)


@pytest.mark.parametrize("bad", ["0.5", "1e3", "nan", "1/0", "", "x", 1.5, True, None])
def test_rational_rejections(bad):
    with pytest.raises(DocumentError):
        parse_rat(bad)


def test_to_jsonable_blocks_floats():
    assert to_jsonable({"a": F(1, 2), "b": [F(3)]}) == {"a": "1/2", "b": ["3"]}
    with pytest.raises(DocumentError):
        to_jsonable({"x": 0.25})


def test_structure_round_trip(diagonal_run):
    text = emit_structure(diagonal_run.structure)
    parsed = parse_structure(text)
    assert emit_parsed(parsed) == text
    doc = json.loads(text)
    assert doc["schema_version"] == 1
    assert doc["generators"][0] == "Q"
    assert "." not in json.dumps(doc["brackets"])  # no float leakage


def test_structure_parse_rejects_damage(diagonal_run):
    text = emit_structure(diagonal_run.structure)
    doc = json.loads(text)
    del doc["brackets"][0]
    with pytest.raises(DocumentError):
        parse_structure(json.dumps(doc))
    with pytest.raises(DocumentError):
        parse_structure("{not json")
    with pytest.raises(DocumentError):
        parse_structure(json.dumps({"kind": "structure", "schema_version": 99}))


def test_realization_document(diagonal_real):
    doc = json.loads(emit_realization(diagonal_real))
    assert doc["kind"] == "realization"
    assert doc["q"] == [["-1/2", "0", "0"], ["0", "-1/2", "0"], ["0", "0", "-1/2"]]
    assert doc["det_q"] == "-1/8"


def test_exit_status_precedence():
    mk = lambda *sts: [{"name": f"c{i}", "status": s, "witness": None}
                       for i, s in enumerate(sts)]
    assert exit_status(mk("pass", "pass")) == 0
    assert exit_status(mk("pass", "finding")) == 3
    assert exit_status(mk("finding", "fail")) == 2
    with pytest.raises(DocumentError):
        exit_status(mk("oops"))


def test_make_report_and_render():
    checks = [{"name": "alpha", "status": "pass", "witness": None},
              {"name": "beta", "status": "finding", "witness": {"n": 3}}]
    doc = make_report("sweep", checks, seed=7, count=2,
                      experimental={"probe": {"outcome": "fail"}})
    assert doc["summary"] == {"pass": 1, "fail": 0, "finding": 1}
    assert doc["exit_status"] == 3
    text = render_human(doc)
    assert "[FINDING] beta" in text
    assert "probe: fail" in text
    assert dump_json(doc).endswith("\n")


def test_sweep_csv_shape():
    rows = [{"index": 0, "alpha": "1", "beta": "0", "gamma": "1", "delta": "0",
             "epsilon": "0", "zeta": "1", "j12": "0", "j23": "0", "j31": "0",
             "checks_failed": 0, "t_kernel_dimension": 2, "claims_hold": True}]
    text = sweep_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0].startswith("index,alpha")
    assert lines[1] == "0,1,0,1,0,0,1,0,0,0,0,2,True"
