import pytest

from helpers import build_suite
from uaprio import sim
from uaprio.suite import validate_suite
from uaprio.sim import SimProfile, SourceStatus, SuiteSpec, Verdict


def profile_for(rates, sources=None, enabled=(), unknown=0.0, seed=0):
    return SimProfile(rates, sources or {}, frozenset(enabled), {}, unknown, seed)


def test_classification_table():
    assert sim.classify(True, SourceStatus.OCCURRED) is Verdict.KN_OCCURRED_WITH_INS
    assert sim.classify(False, SourceStatus.NOT_OCCURRED) is Verdict.KN_NOT_OCCURRED_WITHOUT_INS
    assert sim.classify(True, SourceStatus.UNSPECIFIED) is Verdict.KN_OCCURRED_UK_INS
    observed = {v for v in Verdict if v.observed}
    assert observed == {Verdict.KN_OCCURRED_WITH_INS, Verdict.KN_OCCURRED_WITHOUT_INS,
                        Verdict.KN_OCCURRED_UK_INS, Verdict.UK_OCCURRED}


def test_forced_occurrence_with_enabled_source():
    suite = build_suite([1], us=[["u"]])
    prof = profile_for({"u": 1.0}, {"u": frozenset({"S"})}, enabled={"S"})
    for rep in range(20):
        out = sim.execute(suite.tests[0], prof, rep)
        assert out.verdicts == (("u", Verdict.KN_OCCURRED_WITH_INS),)


def test_no_occurrence_without_source():
    suite = build_suite([1], us=[["u"]])
    prof = profile_for({"u": 0.0})
    for rep in range(20):
        assert sim.execute(suite.tests[0], prof, rep).verdicts == (("u", Verdict.KN_NOT_OCCURRED_UK_INS),)


def test_exact_count_without_unknowns():
    suite = build_suite([1], us=[["a", "b"]])
    out = sim.execute(suite.tests[0], profile_for({"a": 1.0, "b": 0.0}))
    assert out.nou == 1


def test_multiplicity_counts_each_visit():
    suite = build_suite([1], us=[["a", "a", "a"]])
    assert sim.execute(suite.tests[0], profile_for({"a": 1.0})).nou == 3


def test_missing_rate_names_the_uncertainty():
    suite = build_suite([1], us=[["ghost"]])
    with pytest.raises(sim.SimConfigError, match="ghost"):
        sim.execute(suite.tests[0], profile_for({}))


def test_bad_rate_is_rejected():
    with pytest.raises(sim.SimConfigError):
        profile_for({"a": 1.5})


def test_execution_is_reproducible():
    suite, prof = sim.generate_synthetic_suite(SuiteSpec(n_tests=30), 2)
    a = sim.execute_sequence(suite.tests, prof, 3)
    b = sim.execute_sequence(suite.tests, prof, 3)
    assert a == b
    assert a != sim.execute_sequence(suite.tests, prof, 4)


def outcome(nou, ms=1000):
    return sim.ExecutionOutcome("t", (), nou, ms)


def test_anou_examples():
    assert sim.anou([outcome(0), outcome(0)]) == 0.0
    assert sim.anou([outcome(3)]) == 3.0
    assert sim.anou([outcome(2), outcome(0), outcome(1)]) == pytest.approx(7 / 9, abs=1e-12)
    assert sim.anou([]) == 0.0


def test_anou_trace():
    assert sim.anou_trace([outcome(2)], steps=4) == [(1.0, 1, 2.0)]
    flat = sim.anou_trace([outcome(0), outcome(0)], steps=2)
    assert [v for _, _, v in flat] == [0.0, 0.0]
    seq = [outcome(2, 1000), outcome(0, 1000), outcome(1, 2000)]
    trace = sim.anou_trace(seq, steps=4)
    assert [(f, n) for f, n, _ in trace] == [(0.25, 1), (0.5, 2), (0.75, 2), (1.0, 3)]
    for _, n, value in trace:
        assert value == sim.anou(seq[:n])


def test_aw1_like_totals():
    spec = SuiteSpec(n_tests=420, n_transitions=84, n_uncertainties=52, n_spaces=26,
                     et_total_s=7924)
    suite, _ = sim.generate_synthetic_suite(spec, 0)
    assert len(suite) == 420
    assert abs(suite.et_total - 7924) <= 0.05 * 7924
    assert validate_suite(suite) == []


def test_minimal_spec_is_valid():
    spec = SuiteSpec(n_tests=2, n_transitions=1, n_uncertainties=1, n_spaces=1, n_regions=1)
    suite, prof = sim.generate_synthetic_suite(spec, 0)
    assert len(suite) == 2 and validate_suite(suite) == []
    assert set(prof.rates) == set(suite.uncertainties)


@pytest.mark.parametrize("change", [dict(n_spaces=40), dict(n_tests=1), dict(linkage=2.0),
                                    dict(nu_range=(3, 1)), dict(target_rho=1.5)])
def test_infeasible_specs(change):
    spec = SuiteSpec(**{"n_tests": 10, "n_spaces": 5, **change})
    with pytest.raises(ValueError):
        sim.generate_synthetic_suite(spec, 0)


def test_generation_is_deterministic():
    spec = SuiteSpec(n_tests=40, target_rho=0.5)
    a = sim.generate_synthetic_suite(spec, 8)
    b = sim.generate_synthetic_suite(spec, 8)
    assert a[0] == b[0] and a[1].rates == b[1].rates


def test_linkage_moves_the_correlation():
    rhos = []
    for linkage in (0.0, 1.0):
        suite, prof = sim.generate_synthetic_suite(SuiteSpec(n_tests=200, linkage=linkage), 5)
        rhos.append(sim.measured_rho(suite, prof))
    assert rhos[1] > 0.6 and rhos[1] - rhos[0] > 0.5


def test_diagnostics_over_full_suite():
    suite, prof = sim.generate_synthetic_suite(SuiteSpec(n_tests=50), 1)
    d = sim.suite_diagnostics(suite, prof)
    nu = sum(t.nu for t in suite.tests)
    assert d["avg_et_per_nu_full_suite"] == pytest.approx(suite.et_total / nu)
    assert d["avg_et_per_nou_full_suite"] > 0
