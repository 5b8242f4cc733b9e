import math
from dataclasses import replace
from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import build_suite
from uaprio.suite import (MeasurementTheory, TestSuite, ValidationError, derive_um,
                          multiplicity, seconds_to_ms, validate_suite)

UT = MeasurementTheory.UNCERTAINTY
PT = MeasurementTheory.PROBABILITY
measure = st.floats(min_value=1e-6, max_value=1.0, allow_nan=False)


def test_um_minimum_and_product():
    m = {"un2": 0.98, "un4": 0.99}
    us = ["un2", "un4", "un4"]
    assert derive_um(us, m, UT) == 0.98
    assert derive_um(us, m, PT) == pytest.approx(0.960498, abs=1e-12)


def test_um_empty_is_one():
    assert derive_um([], {}, UT) == 1.0
    assert derive_um([], {}, PT) == 1.0


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.5])
def test_um_rejects_measure_outside_unit_interval(bad):
    with pytest.raises(ValidationError, match="'u1'"):
        derive_um(["u1"], {"u1": bad})


def test_theory_parse_accepts_aliases():
    assert MeasurementTheory.parse("probability") is PT
    assert MeasurementTheory.parse("UncertaintyTheory") is UT
    with pytest.raises(ValidationError):
        MeasurementTheory.parse("fuzzy")


def test_seconds_to_ms_is_exact():
    assert seconds_to_ms(Decimal("0.001")) == 1
    assert seconds_to_ms(2.5) == 2500
    assert seconds_to_ms("12.345") == 12345


@given(st.lists(measure, min_size=0, max_size=8), st.randoms())
def test_um_order_independent(values, rnd):
    ids = [f"u{i}" for i in range(len(values))]
    m = dict(zip(ids, values))
    shuffled = ids[:]
    rnd.shuffle(shuffled)
    assert derive_um(ids, m, UT) == derive_um(shuffled, m, UT)
    assert math.isclose(derive_um(ids, m, PT), derive_um(shuffled, m, PT), rel_tol=1e-12)


@given(st.lists(measure, min_size=0, max_size=8))
def test_measure_one_never_changes_um(values):
    ids = [f"u{i}" for i in range(len(values))]
    m = dict(zip(ids, values), extra=1.0)
    for theory in (UT, PT):
        assert derive_um(ids + ["extra"], m, theory) == derive_um(ids, m, theory)


@given(st.lists(measure, min_size=0, max_size=8))
def test_minimum_bounds_product(values):
    ids = [f"u{i}" for i in range(len(values))]
    m = dict(zip(ids, values))
    assert derive_um(ids, m, UT) >= derive_um(ids, m, PT) * (1 - 1e-12)
    if len(values) <= 1:
        assert derive_um(ids, m, UT) == derive_um(ids, m, PT)


def test_safehome_fixture_is_valid(safehome):
    suite, profile = safehome
    assert validate_suite(suite) == []
    t1 = suite.tests[0]
    assert (len(t1.tr), t1.um, len(t1.uu), len(t1.usp)) == (5, 0.98, 2, 2)
    assert multiplicity(t1)["un4"] == 2
    assert profile is not None and profile.rates["un2"] == 0.6


def test_uu_mismatch_is_one_violation():
    suite = build_suite([1, 2], us=[["a"], ["b"]], measures={"a": 0.9, "b": 0.8})
    broken = replace(suite.tests[0], uu=frozenset({"a", "b"}))
    bad = TestSuite((broken, suite.tests[1]), suite.ntr, suite.nuu, suite.nusp,
                    suite.uncertainties, suite.spaces, suite.measurement_theory)
    v = validate_suite(bad)
    assert [(x.subject, x.field) for x in v] == [("t1", "uu")]


def test_et_total_mismatch_is_one_violation():
    suite = build_suite([1, 2])
    bad = replace(suite, et_total_ms=suite.et_total_ms + 1)
    assert [(x.subject, x.field) for x in validate_suite(bad)] == [("suite", "et_total")]


def test_totals_below_coverage_are_reported():
    suite = build_suite([1, 2], transitions=[["a", "b"], ["c"]])
    bad = replace(suite, ntr=2)
    assert [(x.subject, x.field) for x in validate_suite(bad)] == [("suite", "ntr")]


def test_um_disagreeing_with_measures_is_reported():
    suite = build_suite([1], us=[["a"]], measures={"a": 0.9})
    bad = replace(suite, tests=(replace(suite.tests[0], um=0.5),))
    assert [(x.subject, x.field) for x in validate_suite(bad)] == [("t1", "um")]


def test_test_without_uncertainty_gets_um_one():
    suite = build_suite([3])
    assert suite.tests[0].um == 1.0 and suite.tests[0].nu == 0
    assert validate_suite(suite) == []
