import json

from clifford_doubling import derive_params, run_report
from clifford_doubling.export import dumps_report
from clifford_doubling.suites import Section, run_suites


def test_section_logic():
    s = Section("x")
    s.upper("a", 1.0, 2.0)
    s.within("b", 5.0, 0.0, 1.0, hard=False)
    assert s.passed
    s.add("c", 0.0, 1.0, False)
    assert not s.passed


def test_report_ambient_and_construction():
    rep, code = run_report(derive_params(6), ["ambient", "construction"],
                           options={"construction": {"m_values": range(6, 9)}})
    assert code == 0
    d = rep.to_dict(deterministic=True)
    assert list(d["sections"]) == ["ambient", "construction"]
    assert "timings" not in d and "elapsed" not in d["sections"]["ambient"]
    json.loads(dumps_report(d))


def test_unknown_suite_rejected():
    import pytest
    with pytest.raises(ValueError):
        run_suites(derive_params(6), ["nope"])


def test_error_is_recorded():
    # a zeta stencil that pushes m tau past 1 makes the force suite error out
    rep, code = run_report(derive_params(4), ["force"], options={"force": {"stencil": 1.5}})
    assert code == 3
    assert rep.sections["force"].status == "error"
    assert "ConstructionError" in rep.sections["force"].error


def test_neck_suite():
    rep, code = run_report(derive_params(8), ["neck"])
    assert code == 0, rep.to_dict()
