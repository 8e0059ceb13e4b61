import pytest

from hqcl.suites import GOLDEN, SUITES, golden_case, run_golden, run_suite


@pytest.mark.parametrize("name", ["nval", "gates", "entangle"])
def test_suite_passes(name):
    results = run_suite(name, trials=50, seed=1)
    assert results and all(r.passed for r in results), [r.detail for r in results if not r.passed]


def test_golden_ids_and_provenance():
    ids = [c.id for c in GOLDEN]
    assert ids == [f"nval-{i}" for i in range(1, 11)] + ["nval-10b"]
    derived = {c.id for c in GOLDEN if c.provenance == "derived"}
    assert derived == {"nval-4", "nval-10b"}


def test_golden_case_records_compositionality():
    assert run_golden(golden_case("nval-2")).measured["compositional"] is False
    assert run_golden(golden_case("nval-1")).measured["compositional"] is True


def test_sweep_is_deterministic():
    a = [r.as_dict() for r in run_suite("valbool", trials=5, seed=2)[:3]]
    b = [r.as_dict() for r in run_suite("valbool", trials=5, seed=2)[:3]]
    assert a == b


def test_unknown_suite():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suite("everything")
    assert "all" not in SUITES
