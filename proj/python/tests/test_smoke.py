from pathlib import Path

import pytest

import flowrefine

DATA = Path(__file__).resolve().parents[2] / "data" / "case_study"


def path(name):
    return str(DATA / name)


def test_validate_original():
    r = flowrefine.validate(path("original.arch"))
    assert r["exit"] == 0
    assert r["ok"] is True


def test_simulate_matches_golden_run_count():
    r = flowrefine.simulate(path("original.arch"), path("store_then_query.env"))
    assert r["exit"] == 0
    assert len(r["runs"]) == 10
    assert r["horizon"] == 4


def test_check_refinement():
    assert flowrefine.check_refinement(path("original.arch"), path("final.arch"))["exit"] == 0
    broken = flowrefine.check_refinement(path("original.arch"), path("broken_final.arch"), horizon=6)
    assert broken["exit"] == 1
    assert broken["result"]["holds"] is False
    assert broken["result"]["counterexample"]["tuples"]


def test_apply_script_reproduces_golden():
    r = flowrefine.apply_script(path("original.arch"), path("script.txt"), verify=True)
    assert r["exit"] == 0
    assert r["replay"]["ok"] is True
    assert len(r["replay"]["steps"]) == 13
    assert r["replay"]["architecture"] == (DATA / "final.arch").read_text()


def test_case_study_mutant_rejected():
    r = flowrefine.case_study(mutant=True, verify=False, horizon=5)
    assert r["exit"] == 1
    failed = r["replay"]["steps"][r["replay"]["failed_step"] - 1]
    assert failed["stage"] == 6
    assert failed["applied"] is False


def test_parse_errors_raise():
    with pytest.raises(ValueError):
        flowrefine.canonical_architecture("component\n")
    with pytest.raises(ValueError):
        flowrefine.validate(path("missing.arch"))
    text = (DATA / "original.arch").read_text()
    assert flowrefine.canonical_architecture(text) == text


def test_codec():
    assert flowrefine.delta(1, 2) == 1
    assert flowrefine.rho(1, 1) == 2
    assert flowrefine.delta(None, 2) == 2
    with pytest.raises(flowrefine.Error):
        flowrefine.rho(1, 5)
