from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import build_suite
from oracles import small_suite
from uaprio import _backend
from uaprio import objectives as obj
from uaprio.objectives import Direction, ProblemDef
from uaprio.search.common import Evaluator

EXACT = 1e-12


def solution(suite, order, tb=1):
    return obj.truncate_to_budget(order, suite, tb)


def test_position_impact():
    assert obj.pi(1, 5) == 1.0
    assert obj.pi(5, 5) == 0.2
    assert obj.pi(2, 3) == pytest.approx(2 / 3, abs=EXACT)
    with pytest.raises(ValueError):
        obj.pi(0, 3)
    with pytest.raises(ValueError):
        obj.pi(4, 3)


def test_budget_boundary_is_inclusive():
    suite = build_suite([2, 3, 5])
    assert solution(suite, (0, 1, 2), 0.5).prefix == (0, 1)
    assert solution(suite, (2, 0, 1), 0.5).prefix == (2,)
    assert solution(suite, (2, 1, 0), 1.0).prefix_len == 3
    assert solution(suite, (2, 1, 0), 50).prefix == (2,)


def test_budget_too_small_gives_empty_prefix():
    suite = build_suite([2, 3, 5])
    sol = solution(suite, (2, 1, 0), 0.1)
    assert sol.prefix_len == 0
    vec = obj.evaluate(ProblemDef(6, 0.1), (2, 1, 0), suite)
    assert vec.values == (0.0, 0.0, 0.0, 0.0)
    assert vec.directions[0] is Direction.MINIMIZE


def test_pet_examples():
    suite = build_suite([2, 3, 5])
    assert obj.pet(solution(suite, (2, 0, 1)), suite) == pytest.approx(22 / 30, abs=EXACT)
    assert obj.pet(solution(suite, (0, 1, 2)), suite) == pytest.approx(17 / 30, abs=EXACT)
    assert obj.pet(solution(suite, (0, 1, 2), 0.1), suite) == 0.0


def test_ptr_examples():
    one = build_suite([1], transitions=[["a", "b", "c"]])
    assert obj.ptr(solution(one, (0,)), one) == pytest.approx(1.0, abs=EXACT)
    dup = build_suite([1, 1], transitions=[["a", "b"], ["a", "b"]])
    assert obj.ptr(solution(dup, (0, 1)), dup) == pytest.approx(1.0, abs=EXACT)
    two = build_suite([1, 1], transitions=[["a"], ["b"]])
    assert obj.ptr(solution(two, (0, 1)), two) == pytest.approx(0.75, abs=EXACT)


def test_aum_examples():
    ones = build_suite([1, 1, 1])
    assert obj.aum(solution(ones, (0, 1, 2)), ones) == pytest.approx(2 / 3, abs=EXACT)
    single = build_suite([1], us=[["u"]], measures={"u": 0.98})
    assert obj.aum(solution(single, (0,)), single) == pytest.approx(0.98, abs=EXACT)
    mixed = build_suite([1, 1], us=[["u"], []], measures={"u": 0.5})
    assert obj.aum(solution(mixed, (0, 1)), mixed) == pytest.approx(0.5, abs=EXACT)


@pytest.mark.parametrize("mt", range(1, 9))
def test_aum_arithmetic_series(mt):
    suite = build_suite([1] * mt)
    value = obj.aum(solution(suite, tuple(range(mt))), suite)
    assert value == pytest.approx((mt + 1) / (2 * mt), abs=EXACT)


def test_anu_examples():
    assert obj.nor(0) == 0.0
    assert obj.nor(1) == 0.5
    suite = build_suite([1, 1], us=[["a", "b", "c"], ["a"]])
    assert obj.anu(solution(suite, (0, 1)), suite) == pytest.approx(0.5, abs=EXACT)


def test_puu_examples():
    full = build_suite([1], us=[["a", "b"]])
    assert obj.puu(solution(full, (0,)), full) == pytest.approx(1.0, abs=EXACT)
    # second test adds nothing new: (1 * 1 + 0 * 0.5) / 2
    same = build_suite([1, 1], us=[["a"], ["a"]], nuu=2)
    assert obj.puu(solution(same, (0, 1)), same) == pytest.approx(0.5, abs=EXACT)
    assert obj.puu(solution(same, (1, 0)), same) == pytest.approx(0.5, abs=EXACT)
    empty = build_suite([1, 1, 1])
    assert obj.puu(solution(empty, (0, 1, 2)), empty) == 0.0


def test_pus_examples():
    full = build_suite([1], us=[["a", "b"]], spaces={"a": "s1", "b": "s2"})
    assert obj.pus(solution(full, (0,)), full) == pytest.approx(1.0, abs=EXACT)
    same = build_suite([1, 1], us=[["a"], ["a"]], spaces={"a": "s1"}, nusp=2)
    assert obj.pus(solution(same, (0, 1)), same) == pytest.approx(0.375, abs=EXACT)
    none = build_suite([1, 1])
    assert obj.pus(solution(none, (0, 1)), none) == 0.0


def test_problem_table():
    expected = {1: "AUM", 2: "PUS", 3: "ANU", 4: "PUU", 5: "AUM PUS", 6: "AUM ANU",
                7: "AUM PUU", 8: "PUS ANU", 9: "PUS PUU", 10: "ANU PUU"}
    for pid, names in expected.items():
        p = ProblemDef(pid)
        assert p.names == ("PET", "PTR", *names.split())
        assert p.directions[0] is Direction.MINIMIZE
        assert all(d is Direction.MAXIMIZE for d in p.directions[1:])
    with pytest.raises(ValueError):
        ProblemDef(11)


def test_dominance_examples():
    dirs = (Direction.MINIMIZE, Direction.MAXIMIZE, Direction.MAXIMIZE)
    v = lambda *x: obj.ObjectiveVector(x, dirs, 1)  # noqa: E731
    assert obj.dominates(v(0.2, 0.9, 0.9), v(0.3, 0.8, 0.8))
    assert not obj.dominates(v(0.2, 0.9, 0.9), v(0.2, 0.9, 0.9))
    assert not obj.dominates(v(0.2, 0.7, 0.5), v(0.3, 0.8, 0.5))
    assert not obj.dominates(v(0.3, 0.8, 0.5), v(0.2, 0.7, 0.5))
    with pytest.raises(ValueError):
        obj.dominates(v(0.2, 0.9, 0.9), obj.ObjectiveVector((0.1, 0.1, 0.1), dirs, 2))


def test_budget_fraction_forms():
    assert obj.budget_fraction(50) == Fraction(1, 2)
    assert obj.budget_fraction(0.3) == Fraction(3, 10)
    with pytest.raises(ValueError):
        obj.budget_fraction(0)


ets = st.lists(st.integers(min_value=1, max_value=5000), min_size=1, max_size=9)


@given(ets, st.sampled_from(obj.BUDGETS), st.randoms())
def test_truncation_is_the_maximal_prefix(times, tb, rnd):
    suite = build_suite([t / 1000 for t in times])
    order = list(range(len(times)))
    rnd.shuffle(order)
    sol = obj.truncate_to_budget(order, suite, tb)
    limit = Fraction(tb, 100) * sum(times)
    used = sum(times[i] for i in sol.prefix)
    assert used <= limit
    if sol.prefix_len < len(times):
        assert used + times[order[sol.prefix_len]] > limit


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 10), st.sampled_from((10, 30, 50, 100)))
def test_values_lie_in_unit_interval_and_repeat(seed, pid, tb):
    suite = small_suite(seed % 50)
    rng = np.random.default_rng(seed)
    perm = tuple(rng.permutation(len(suite)).tolist())
    a = obj.evaluate(ProblemDef(pid, tb), perm, suite)
    b = obj.evaluate(ProblemDef(pid, tb), perm, suite)
    assert a == b
    assert all(0.0 <= x <= 1.0 for x in a.values)


@pytest.mark.parametrize("backend", _backend.available())
def test_batch_evaluation_matches_scalar_functions(backend):
    rng = np.random.default_rng(3)
    with _backend.using(backend):
        for seed in range(6):
            suite = small_suite(seed)
            for pid in range(1, 11):
                for tb in (10, 40, 100):
                    problem = ProblemDef(pid, tb)
                    perms = np.array([rng.permutation(len(suite)) for _ in range(8)], dtype=np.int32)
                    raw, _, mts = Evaluator(problem, suite)(perms)
                    for row, perm, mt in zip(raw, perms, mts):
                        ref = obj.evaluate(problem, perm.tolist(), suite)
                        assert np.allclose(row, ref.values, atol=1e-12, rtol=0)
                        assert mt == obj.truncate_to_budget(perm.tolist(), suite, tb).prefix_len
