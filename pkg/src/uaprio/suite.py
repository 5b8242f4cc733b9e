"""Domain types for tests, uncertainties and suites.

All values are immutable once built. Execution times are held as integer
milliseconds so that budget arithmetic is exact.
"""
from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Iterable, Mapping, Sequence


class ValidationError(ValueError):
    """Raised when suite data breaks a model invariant."""


class MeasurementTheory(str, enum.Enum):
    UNCERTAINTY = "UncertaintyTheory"
    PROBABILITY = "ProbabilityTheory"

    @classmethod
    def parse(cls, value: "str | MeasurementTheory") -> "MeasurementTheory":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        for member in cls:
            if key in (member.value.lower(), member.name.lower(),
                       member.value.lower().replace("theory", "")):
                return member
        raise ValidationError(f"unknown measurement theory {value!r}")


def seconds_to_ms(seconds) -> int:
    """Round a duration in seconds to whole milliseconds (half-even)."""
    d = Decimal(str(seconds)) * 1000
    return int(d.quantize(Decimal(1), rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True)
class Transition:
    id: str
    source_state: str
    target_state: str


@dataclass(frozen=True)
class Uncertainty:
    id: str
    space_id: str
    measure: float
    indeterminacy_sources: frozenset = frozenset()
    # Simulator ground truth; fitness evaluation never reads it.
    occurrence_rate: float = 0.0


@dataclass(frozen=True)
class UncertaintySpace:
    id: str
    members: frozenset


@dataclass(frozen=True)
class TestCase:
    id: str
    et_ms: int
    tr: frozenset = frozenset()
    us: tuple = ()
    uu: frozenset = frozenset()
    usp: frozenset = frozenset()
    um: float = 1.0

    __test__ = False  # keep pytest from collecting this class

    @property
    def et(self) -> float:
        return self.et_ms / 1000.0

    @property
    def nu(self) -> int:
        return len(self.us)


@dataclass(frozen=True)
class TestSuite:
    tests: tuple
    ntr: int
    nuu: int
    nusp: int
    uncertainties: Mapping[str, Uncertainty] = field(default_factory=dict)
    spaces: Mapping[str, UncertaintySpace] = field(default_factory=dict)
    measurement_theory: MeasurementTheory = MeasurementTheory.UNCERTAINTY
    et_total_ms: int | None = None

    __test__ = False

    def __post_init__(self):
        object.__setattr__(self, "tests", tuple(self.tests))
        if self.et_total_ms is None:
            object.__setattr__(self, "et_total_ms", sum(t.et_ms for t in self.tests))

    def __len__(self) -> int:
        return len(self.tests)

    @property
    def et_total(self) -> float:
        return self.et_total_ms / 1000.0

    @property
    def test_ids(self) -> list[str]:
        return [t.id for t in self.tests]


def derive_um(us: Iterable[str], measures: Mapping[str, float],
              theory: MeasurementTheory | str = MeasurementTheory.UNCERTAINTY) -> float:
    """Uncertainty measure of one test from the measures of its uncertainties.

    ``us`` is the multiset of uncertainty ids visited by the test. Under
    Uncertainty Theory the result is the minimum measure; under Probability
    Theory it is the product taken with multiplicity. A test without any
    uncertainty gets 1.0.
    """
    theory = MeasurementTheory.parse(theory)
    values = []
    for uid in us:
        m = measures[uid]
        if not (0.0 < m <= 1.0):
            raise ValidationError(f"uncertainty {uid!r} has measure {m} outside (0, 1]")
        values.append(m)
    if not values:
        return 1.0
    if theory is MeasurementTheory.UNCERTAINTY:
        return min(values)
    return math.prod(values)


@dataclass(frozen=True)
class Violation:
    subject: str
    field: str
    description: str

    def __str__(self) -> str:
        return f"{self.subject}.{self.field}: {self.description}"


def validate_suite(suite: TestSuite, um_tol: float = 1e-9) -> list[Violation]:
    """Check every test, uncertainty and space invariant; return the breaches."""
    out: list[Violation] = []
    unc = suite.uncertainties
    spaces = suite.spaces

    if not suite.tests:
        out.append(Violation("suite", "tests", "suite has no tests"))

    seen_ids = set()
    for t in suite.tests:
        if t.id in seen_ids:
            out.append(Violation(t.id, "id", "duplicate test id"))
        seen_ids.add(t.id)

    owner: dict[str, str] = {}
    for sp in spaces.values():
        if not sp.members:
            out.append(Violation(sp.id, "members", "uncertainty space has no members"))
        for uid in sp.members:
            if uid in owner:
                out.append(Violation(sp.id, "members",
                                     f"{uid!r} also belongs to space {owner[uid]!r}"))
            owner[uid] = sp.id
            if uid not in unc:
                out.append(Violation(sp.id, "members", f"undeclared uncertainty {uid!r}"))

    for u in unc.values():
        if not (0.0 < u.measure <= 1.0):
            out.append(Violation(u.id, "measure", f"{u.measure} outside (0, 1]"))
        if not (0.0 <= u.occurrence_rate <= 1.0):
            out.append(Violation(u.id, "rate", f"{u.occurrence_rate} outside [0, 1]"))
        if u.space_id not in spaces:
            out.append(Violation(u.id, "space", f"undeclared space {u.space_id!r}"))
        elif u.id not in spaces[u.space_id].members:
            out.append(Violation(u.id, "space",
                                 f"not listed as a member of {u.space_id!r}"))

    all_tr, all_uu, all_usp = set(), set(), set()
    for t in suite.tests:
        if t.et_ms <= 0:
            out.append(Violation(t.id, "execution_time", "must be positive"))
        missing = [uid for uid in dict.fromkeys(t.us) if uid not in unc]
        for uid in missing:
            out.append(Violation(t.id, "us", f"undeclared uncertainty {uid!r}"))
        if t.uu != frozenset(t.us):
            out.append(Violation(t.id, "uu", "does not equal the distinct elements of us"))
        if not missing:
            # checked against us itself so a broken uu is reported once
            expected_usp = frozenset(unc[uid].space_id for uid in set(t.us))
            if t.usp != expected_usp:
                out.append(Violation(t.id, "usp", "does not equal the spaces of us"))
            try:
                um = derive_um(t.us, {k: v.measure for k, v in unc.items()},
                               suite.measurement_theory)
            except ValidationError as exc:
                out.append(Violation(t.id, "um", str(exc)))
            else:
                if abs(um - t.um) > um_tol:
                    out.append(Violation(t.id, "um", f"{t.um} but derived {um}"))
        all_tr |= t.tr
        all_uu |= t.uu
        all_usp |= t.usp

    for name, total, covered in (("ntr", suite.ntr, all_tr), ("nuu", suite.nuu, all_uu),
                                 ("nusp", suite.nusp, all_usp)):
        if total <= 0:
            out.append(Violation("suite", name, "model total must be positive"))
        elif total < len(covered):
            out.append(Violation("suite", name,
                                 f"{total} is below the {len(covered)} covered by tests"))

    if suite.et_total_ms != sum(t.et_ms for t in suite.tests):
        out.append(Violation("suite", "et_total", "does not equal the sum of test times"))
    elif suite.tests and suite.et_total_ms <= 0:
        out.append(Violation("suite", "et_total", "must be positive"))
    return out


def make_test(id: str, et_seconds, transitions: Sequence[Transition] = (),
              us: Sequence[str] = (), uncertainties: Mapping[str, Uncertainty] | None = None,
              theory: MeasurementTheory | str = MeasurementTheory.UNCERTAINTY) -> TestCase:
    """Build a TestCase, deriving uu, usp and um from ``us``."""
    uncertainties = uncertainties or {}
    us = tuple(us)
    uu = frozenset(us)
    usp = frozenset(uncertainties[u].space_id for u in uu)
    um = derive_um(us, {k: v.measure for k, v in uncertainties.items()}, theory)
    return TestCase(id=id, et_ms=seconds_to_ms(et_seconds), tr=frozenset(transitions),
                    us=us, uu=uu, usp=usp, um=um)


def multiplicity(test: TestCase) -> Counter:
    return Counter(test.us)
