"""Position-weighted prioritization objectives and the ten problem definitions.

A genome is always a full permutation of suite indices. The time budget is
applied by keeping the longest prefix that fits, so every genome is feasible.

The scalar functions here (``pet``, ``ptr`` ...) are the readable reference
path. Batch evaluation for the search engine goes through the compiled
kernels, which accumulate in exactly the same order and therefore agree bit
for bit.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .suite import TestSuite, ValidationError


class Direction(str, enum.Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"


class Measure(enum.IntEnum):
    AUM = 0
    PUS = 1
    ANU = 2
    PUU = 3


PROBLEMS: dict[int, tuple[Measure, ...]] = {
    1: (Measure.AUM,),
    2: (Measure.PUS,),
    3: (Measure.ANU,),
    4: (Measure.PUU,),
    5: (Measure.AUM, Measure.PUS),
    6: (Measure.AUM, Measure.ANU),
    7: (Measure.AUM, Measure.PUU),
    8: (Measure.PUS, Measure.ANU),
    9: (Measure.PUS, Measure.PUU),
    10: (Measure.ANU, Measure.PUU),
}

BUDGETS = tuple(range(10, 101, 10))


def budget_fraction(tb) -> Fraction:
    """Normalize a budget given as a fraction (0.5) or a percentage (50)."""
    if isinstance(tb, Fraction):
        frac = tb
    else:
        frac = Fraction(str(tb))
    if frac > 1:
        frac = frac / 100
    if not (0 < frac <= 1):
        raise ValueError(f"time budget {tb!r} outside (0, 1]")
    return frac


@dataclass(frozen=True)
class ProblemDef:
    id: int
    budget_fraction: Fraction = Fraction(1)

    def __post_init__(self):
        if self.id not in PROBLEMS:
            raise ValueError(f"problem id must be 1..10, got {self.id}")
        object.__setattr__(self, "budget_fraction", budget_fraction(self.budget_fraction))

    @property
    def measures(self) -> tuple[Measure, ...]:
        return PROBLEMS[self.id]

    @property
    def names(self) -> tuple[str, ...]:
        return ("PET", "PTR") + tuple(m.name for m in self.measures)

    @property
    def directions(self) -> tuple[Direction, ...]:
        return (Direction.MINIMIZE,) + (Direction.MAXIMIZE,) * (1 + len(self.measures))

    @property
    def n_objectives(self) -> int:
        return 2 + len(self.measures)

    @property
    def budget_percent(self) -> float:
        return float(self.budget_fraction * 100)

    def signs(self) -> np.ndarray:
        """+1 for minimized, -1 for maximized objectives."""
        return np.array([1.0 if d is Direction.MINIMIZE else -1.0 for d in self.directions])


@dataclass(frozen=True)
class PrioritizedSolution:
    permutation: tuple
    prefix_len: int
    budget_fraction: Fraction

    @property
    def prefix(self) -> tuple:
        return self.permutation[: self.prefix_len]


@dataclass(frozen=True)
class ObjectiveVector:
    values: tuple
    directions: tuple
    problem_id: int

    def __len__(self):
        return len(self.values)


def pi(j: int, mt: int) -> float:
    """Weight of position ``j`` (1-based) in a prefix of ``mt`` tests."""
    if not (1 <= j <= mt):
        raise ValueError(f"position {j} outside 1..{mt}")
    return (mt - j + 1) / mt


def nor(x: float) -> float:
    return x / (x + 1.0)


def _check_permutation(permutation: Sequence[int], n: int) -> tuple:
    perm = tuple(int(i) for i in permutation)
    if sorted(perm) != list(range(n)):
        raise ValueError("permutation is not a bijection over the suite indices")
    return perm


def truncate_to_budget(permutation: Sequence[int], suite: TestSuite, tb) -> PrioritizedSolution:
    frac = budget_fraction(tb)
    perm = _check_permutation(permutation, len(suite))
    limit = frac.numerator * suite.et_total_ms
    used = 0
    mt = 0
    for idx in perm:
        used += suite.tests[idx].et_ms
        if used * frac.denominator > limit:
            break
        mt += 1
    return PrioritizedSolution(perm, mt, frac)


def _prefix_tests(sol: PrioritizedSolution, suite: TestSuite):
    return [suite.tests[i] for i in sol.prefix]


def pet(sol: PrioritizedSolution, suite: TestSuite) -> float:
    tests = _prefix_tests(sol, suite)
    mt = len(tests)
    acc = 0.0
    for j, t in enumerate(tests, 1):
        acc += t.et_ms * ((mt - j + 1) / mt)
    return acc / suite.et_total_ms


def _incremental(sol, suite, attr: str, total: int) -> float:
    if total <= 0:
        raise ValidationError(f"model total for {attr} must be positive")
    tests = _prefix_tests(sol, suite)
    mt = len(tests)
    seen: set = set()
    acc = 0.0
    for j, t in enumerate(tests, 1):
        items = getattr(t, attr)
        new = len(items - seen)
        seen |= items
        acc += new * ((mt - j + 1) / mt)
    return acc / total


def ptr(sol: PrioritizedSolution, suite: TestSuite) -> float:
    return _incremental(sol, suite, "tr", suite.ntr)


def puu(sol: PrioritizedSolution, suite: TestSuite) -> float:
    return _incremental(sol, suite, "uu", suite.nuu)


def _averaged(sol, suite, per_test) -> float:
    tests = _prefix_tests(sol, suite)
    mt = len(tests)
    if mt == 0:
        return 0.0
    acc = 0.0
    for j, t in enumerate(tests, 1):
        acc += per_test(t) * ((mt - j + 1) / mt)
    return acc / mt


def aum(sol: PrioritizedSolution, suite: TestSuite) -> float:
    return _averaged(sol, suite, lambda t: t.um)


def anu(sol: PrioritizedSolution, suite: TestSuite) -> float:
    return _averaged(sol, suite, lambda t: nor(float(len(t.us))))


def pus(sol: PrioritizedSolution, suite: TestSuite) -> float:
    if suite.nusp <= 0:
        raise ValidationError("model total for usp must be positive")
    return _averaged(sol, suite, lambda t: len(t.usp) / suite.nusp)


def anu_proxy(sol: PrioritizedSolution, suite: TestSuite) -> float:
    """ANOU-shaped score using the specified uncertainty counts instead of observations."""
    return _averaged(sol, suite, lambda t: float(len(t.us)))


_MEASURE_FN = {Measure.AUM: aum, Measure.PUS: pus, Measure.ANU: anu, Measure.PUU: puu}


def evaluate(problem: ProblemDef, permutation: Sequence[int], suite: TestSuite) -> ObjectiveVector:
    sol = truncate_to_budget(permutation, suite, problem.budget_fraction)
    values = [pet(sol, suite), ptr(sol, suite)]
    values += [_MEASURE_FN[m](sol, suite) for m in problem.measures]
    return ObjectiveVector(tuple(values), problem.directions, problem.id)


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    if a.problem_id != b.problem_id or len(a.values) != len(b.values):
        raise ValueError("cannot compare objective vectors of different problems")
    strictly = False
    for x, y, d in zip(a.values, b.values, a.directions):
        if d is Direction.MINIMIZE:
            x, y = -x, -y
        if x < y:
            return False
        if x > y:
            strictly = True
    return strictly


@dataclass(frozen=True)
class EncodedSuite:
    """Flat arrays consumed by the evaluation kernels."""

    et_ms: np.ndarray          # int64[n]
    total_ms: int
    tr_ptr: np.ndarray         # int64[n+1]
    tr_idx: np.ndarray         # int32[...]
    uu_ptr: np.ndarray
    uu_idx: np.ndarray
    um: np.ndarray             # float64[n]
    nor_nu: np.ndarray
    usp_frac: np.ndarray
    ntr: int
    nuu: int
    nusp: int
    n_tr_ids: int
    n_uu_ids: int

    @property
    def n(self) -> int:
        return len(self.et_ms)


def _csr(sets, index):
    ptr = np.zeros(len(sets) + 1, dtype=np.int64)
    flat = []
    for i, items in enumerate(sets):
        ids = sorted(index[x] for x in items)
        flat.extend(ids)
        ptr[i + 1] = len(flat)
    return ptr, np.asarray(flat, dtype=np.int32)


def encode_suite(suite: TestSuite) -> EncodedSuite:
    cached = getattr(suite, "_encoded", None)
    if cached is not None:
        return cached
    if suite.ntr <= 0 or suite.nuu <= 0 or suite.nusp <= 0:
        raise ValidationError("model totals ntr, nuu and nusp must be positive")
    tr_index: dict = {}
    uu_index: dict = {}
    for t in suite.tests:
        for tr in sorted(t.tr, key=lambda x: (x.id, x.source_state, x.target_state)):
            tr_index.setdefault(tr, len(tr_index))
        for u in sorted(t.uu):
            uu_index.setdefault(u, len(uu_index))
    tr_ptr, tr_idx = _csr([t.tr for t in suite.tests], tr_index)
    uu_ptr, uu_idx = _csr([t.uu for t in suite.tests], uu_index)
    enc = EncodedSuite(
        et_ms=np.array([t.et_ms for t in suite.tests], dtype=np.int64),
        total_ms=int(suite.et_total_ms),
        tr_ptr=tr_ptr, tr_idx=tr_idx, uu_ptr=uu_ptr, uu_idx=uu_idx,
        um=np.array([t.um for t in suite.tests], dtype=np.float64),
        nor_nu=np.array([nor(float(len(t.us))) for t in suite.tests], dtype=np.float64),
        usp_frac=np.array([len(t.usp) / suite.nusp for t in suite.tests], dtype=np.float64),
        ntr=int(suite.ntr),
        nuu=int(suite.nuu),
        nusp=int(suite.nusp),
        n_tr_ids=len(tr_index),
        n_uu_ids=len(uu_index),
    )
    object.__setattr__(suite, "_encoded", enc)
    return enc
