"""Simulated uncertainty-aware execution and synthetic suite generation.

Occurrence of each specified uncertainty is a Bernoulli draw with its
ground-truth rate. Indeterminacy sources only affect the verdict label, so
the expected number of observed uncertainties of a test is the sum of its
rates plus the unknown-uncertainty rate.
"""
from __future__ import annotations

import enum
import math
import zlib
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .objectives import pi
from .suite import (MeasurementTheory, TestCase, TestSuite, Transition, Uncertainty,
                    UncertaintySpace, make_test)


class Verdict(str, enum.Enum):
    KN_OCCURRED_WITH_INS = "KnOccurred-With-InS"
    KN_OCCURRED_WITHOUT_INS = "KnOccurred-Without-InS"
    KN_NOT_OCCURRED_WITH_INS = "KnNotOccurred-With-InS"
    KN_NOT_OCCURRED_WITHOUT_INS = "KnNotOccurred-WithoutInS"
    KN_OCCURRED_UK_INS = "KnOccurred-UkInS"
    KN_NOT_OCCURRED_UK_INS = "KnNotOccurred-UkInS"
    UK_OCCURRED = "UkOccurred"

    @property
    def observed(self) -> bool:
        return self in _OBSERVED


_OBSERVED = frozenset({Verdict.KN_OCCURRED_WITH_INS, Verdict.KN_OCCURRED_WITHOUT_INS,
                       Verdict.KN_OCCURRED_UK_INS, Verdict.UK_OCCURRED})


class SourceStatus(str, enum.Enum):
    OCCURRED = "occurred"          # specified, and at least one fired
    NOT_OCCURRED = "not-occurred"  # specified, none fired
    UNSPECIFIED = "unspecified"


_VERDICTS = {
    (True, SourceStatus.OCCURRED): Verdict.KN_OCCURRED_WITH_INS,
    (True, SourceStatus.NOT_OCCURRED): Verdict.KN_OCCURRED_WITHOUT_INS,
    (True, SourceStatus.UNSPECIFIED): Verdict.KN_OCCURRED_UK_INS,
    (False, SourceStatus.OCCURRED): Verdict.KN_NOT_OCCURRED_WITH_INS,
    (False, SourceStatus.NOT_OCCURRED): Verdict.KN_NOT_OCCURRED_WITHOUT_INS,
    (False, SourceStatus.UNSPECIFIED): Verdict.KN_NOT_OCCURRED_UK_INS,
}


def classify(occurred: bool, status: SourceStatus) -> Verdict:
    """Verdict of a specified uncertainty."""
    return _VERDICTS[bool(occurred), SourceStatus(status)]


class SimConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimProfile:
    rates: Mapping[str, float]
    sources: Mapping[str, frozenset] = field(default_factory=dict)
    enabled: frozenset = frozenset()
    trigger_prob: Mapping[str, float] = field(default_factory=dict)
    unknown_rate: float = 0.02
    rng_seed: int = 0
    meta: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name, value in list(self.rates.items()) + list(self.trigger_prob.items()):
            if not (0.0 <= value <= 1.0):
                raise SimConfigError(f"rate for {name!r} is {value}, outside [0, 1]")
        if not (0.0 <= self.unknown_rate <= 1.0):
            raise SimConfigError(f"unknown_rate {self.unknown_rate} outside [0, 1]")

    @classmethod
    def from_suite(cls, suite: TestSuite, enabled=(), trigger_prob=None,
                   unknown_rate: float = 0.02, rng_seed: int = 0) -> "SimProfile":
        unc = suite.uncertainties
        return cls(rates={k: u.occurrence_rate for k, u in unc.items()},
                   sources={k: frozenset(u.indeterminacy_sources) for k, u in unc.items()},
                   enabled=frozenset(enabled), trigger_prob=dict(trigger_prob or {}),
                   unknown_rate=unknown_rate, rng_seed=rng_seed)

    def with_seed(self, seed: int) -> "SimProfile":
        return SimProfile(self.rates, self.sources, self.enabled, self.trigger_prob,
                          self.unknown_rate, seed, self.meta)


@dataclass(frozen=True)
class ExecutionOutcome:
    test_id: str
    verdicts: tuple  # (uncertainty id or None, Verdict) per event
    nou: int
    wall_time_ms: int

    @property
    def wall_time(self) -> float:
        return self.wall_time_ms / 1000.0


def _stable_key(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def test_rng(profile: SimProfile, test_id: str, replicate: int = 0) -> np.random.Generator:
    """Independent stream per (profile seed, test, replicate)."""
    seq = np.random.SeedSequence(entropy=int(profile.rng_seed),
                                 spawn_key=(_stable_key(test_id), int(replicate)))
    return np.random.default_rng(seq)


def execute(test: TestCase, profile: SimProfile, replicate: int = 0,
            rng: np.random.Generator | None = None) -> ExecutionOutcome:
    if rng is None:
        rng = test_rng(profile, test.id, replicate)
    verdicts = []
    nou = 0
    for uid in test.us:
        try:
            rate = profile.rates[uid]
        except KeyError:
            raise SimConfigError(f"no occurrence rate for uncertainty {uid!r}") from None
        occurred = rng.random() < rate
        specified = sorted(profile.sources.get(uid, ()))
        if not specified:
            status = SourceStatus.UNSPECIFIED
        else:
            fired = False
            for src in specified:
                if src in profile.enabled and rng.random() < profile.trigger_prob.get(src, 1.0):
                    fired = True
            status = SourceStatus.OCCURRED if fired else SourceStatus.NOT_OCCURRED
        v = classify(occurred, status)
        verdicts.append((uid, v))
        nou += v.observed
    if rng.random() < profile.unknown_rate:
        verdicts.append((None, Verdict.UK_OCCURRED))
        nou += 1
    return ExecutionOutcome(test.id, tuple(verdicts), nou, test.et_ms)


def execute_sequence(tests: Sequence[TestCase], profile: SimProfile, replicate: int = 0):
    return [execute(t, profile, replicate) for t in tests]


def anou(outcomes: Sequence[ExecutionOutcome]) -> float:
    mt = len(outcomes)
    if mt == 0:
        return 0.0
    acc = 0.0
    for j, o in enumerate(outcomes, 1):
        acc += o.nou * pi(j, mt)
    return acc / mt


def anou_trace(outcomes: Sequence[ExecutionOutcome], steps: int = 10) -> list[tuple]:
    """(used-time fraction, prefix length, ANOU) at every 1/steps of the used time.

    Checkpoints whose prefix is still empty are skipped.
    """
    total = sum(o.wall_time_ms for o in outcomes)
    series = []
    if total == 0:
        return series
    cum = np.cumsum([o.wall_time_ms for o in outcomes])
    for k in range(1, steps + 1):
        # prefix of tests finished by k/steps of the used time, in exact integers
        n = int(np.searchsorted(cum * steps, k * total, side="right"))
        if n:
            series.append((k / steps, n, anou(outcomes[:n])))
    return series


@dataclass(frozen=True)
class SuiteSpec:
    """Shape of a synthetic suite and its simulated ground truth.

    Tests are random walks inside one of ``n_regions`` disconnected parts of
    the state machine. A walk stops once it has visited the region's number
    of uncertainties, so the count per test is set by its region. ``linkage``
    blends per-region rates between a common rate (1.0, observed counts grow
    with specified counts) and rates inversely proportional to the region's
    count (0.0, expected observations equal everywhere). ``target_rho``
    tunes ``linkage`` by bisection on a calibration execution.
    """

    n_tests: int
    n_transitions: int = 40
    n_uncertainties: int = 30
    n_spaces: int = 15
    et_total_s: float | None = None
    n_regions: int = 8
    nu_range: tuple = (1, 20)
    base_rate: float = 0.5
    linkage: float = 1.0
    target_rho: float | None = None
    um_linkage: float = 0.0
    n_sources: int = 4
    unknown_rate: float = 0.02
    theory: str = "UncertaintyTheory"

    def check(self):
        if self.n_tests < 2:
            raise ValueError("a synthetic suite needs at least 2 tests")
        if self.n_transitions < 1 or self.n_uncertainties < 1 or self.n_spaces < 1:
            raise ValueError("need at least one transition, uncertainty and space")
        if self.n_spaces > self.n_uncertainties:
            raise ValueError("more uncertainty spaces than uncertainties")
        if self.n_spaces > self.n_transitions:
            raise ValueError("each uncertainty space needs its own transition")
        lo, hi = self.nu_range
        if not (1 <= lo <= hi):
            raise ValueError("nu_range must satisfy 1 <= low <= high")
        if not (0.0 <= self.linkage <= 1.0 and 0.0 <= self.um_linkage <= 1.0):
            raise ValueError("linkage parameters must lie in [0, 1]")
        if self.target_rho is not None and not (-1.0 <= self.target_rho <= 1.0):
            raise ValueError("target_rho must lie in [-1, 1]")
        if not (0.0 < self.base_rate <= 1.0):
            raise ValueError("base_rate must lie in (0, 1]")
        if self.et_total_s is not None and self.et_total_s <= 0:
            raise ValueError("et_total_s must be positive")


def _split(total: int, parts: int, minimum: int, rng) -> list[int]:
    sizes = [minimum] * parts
    for i in rng.integers(0, parts, total - minimum * parts):
        sizes[int(i)] += 1
    return sizes


def _build_machine(spec: SuiteSpec, rng):
    R = max(1, min(spec.n_regions, spec.n_spaces))
    tr_sizes = _split(spec.n_transitions, R, 1, rng)
    sp_sizes = _split(spec.n_spaces, R, 1, rng)
    # a region cannot host more spaces than transitions
    for r in range(R):
        while sp_sizes[r] > tr_sizes[r]:
            donor = int(np.argmax([t - s for t, s in zip(tr_sizes, sp_sizes)]))
            tr_sizes[donor] -= 1
            tr_sizes[r] += 1
    regions = []
    next_tr = next_sp = 0
    for r in range(R):
        k = max(1, (tr_sizes[r] + 1) // 2)
        states = [f"R{r}S{i}" for i in range(k)]
        edges = []
        for i in range(tr_sizes[r]):
            src = states[i % k]
            if i < k:
                dst = states[(i + 1) % k]
            else:
                dst = states[int(rng.integers(0, k))]
            edges.append(Transition(f"e{next_tr}", src, dst))
            next_tr += 1
        carriers = sorted(rng.choice(len(edges), size=sp_sizes[r], replace=False).tolist())
        space_of = {}
        for c in carriers:
            space_of[c] = f"sp{next_sp}"
            next_sp += 1
        regions.append({"states": states, "edges": edges, "space_of": space_of})
    return regions


def _region_nu(spec: SuiteSpec, R: int) -> list[int]:
    lo, hi = spec.nu_range
    if R == 1:
        return [lo]
    grid = np.geomspace(lo, hi, R)
    return [int(round(x)) for x in grid]


def _walk(region, target: int, rng, members):
    out = {}
    for e in region["edges"]:
        out.setdefault(e.source_state, []).append(e)
    state = region["states"][int(rng.integers(0, len(region["states"])))]
    trs, us = [], []
    steps = 0
    cap = 50 * target + 100
    while len(us) < target and steps < cap:
        choices = out.get(state)
        if not choices:
            break
        idx = int(rng.integers(0, len(choices)))
        e = choices[idx]
        trs.append(e)
        pos = region["edges"].index(e)
        space = region["space_of"].get(pos)
        if space is not None:
            m = members[space]
            us.append(m[int(rng.integers(0, len(m)))])
        state = e.target_state
        steps += 1
    return trs, us, steps


def _rates_for(region_nu, regions_of_unc, linkage, base_rate, jitter):
    # the flat end gives every region the same expected count, capped so no rate exceeds 1
    expected = min(base_rate * float(np.mean(region_nu)), float(min(region_nu)))
    rates = {}
    for uid, r in regions_of_unc.items():
        flat = expected / region_nu[r]
        value = (linkage * base_rate + (1.0 - linkage) * flat) * jitter[uid]
        rates[uid] = float(min(1.0, max(0.0, value)))
    return rates


def measured_rho(suite: TestSuite, profile: SimProfile, replicate: int = 0) -> float:
    from .stats import spearman
    nu = [t.nu for t in suite.tests]
    nou = [execute(t, profile, replicate).nou for t in suite.tests]
    return spearman(nu, nou).rho


def generate_synthetic_suite(spec: SuiteSpec, seed: int = 0):
    """Random suite plus the simulation profile holding its ground truth."""
    spec.check()
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x5EED]))
    regions = _build_machine(spec, rng)
    R = len(regions)
    region_nu = _region_nu(spec, R)

    space_ids = [s for reg in regions for s in sorted(reg["space_of"].values(), key=lambda x: int(x[2:]))]
    counts = _split(spec.n_uncertainties, len(space_ids), 1, rng)
    members: dict[str, list[str]] = {}
    region_of_space = {s: r for r, reg in enumerate(regions) for s in reg["space_of"].values()}
    regions_of_unc = {}
    uid = 0
    for s, c in zip(space_ids, counts):
        members[s] = []
        for _ in range(c):
            name = f"un{uid}"
            members[s].append(name)
            regions_of_unc[name] = region_of_space[s]
            uid += 1
    source_ids = [f"IndS{i}" for i in range(spec.n_sources)]
    unc_sources = {}
    for name in regions_of_unc:
        k = int(rng.integers(0, min(2, len(source_ids)) + 1)) if source_ids else 0
        unc_sources[name] = frozenset(rng.choice(source_ids, size=k, replace=False).tolist()) if k else frozenset()
    jitter = {name: float(np.exp(rng.normal(0.0, 0.05))) for name in regions_of_unc}
    belief_noise = {name: float(rng.random()) for name in regions_of_unc}

    walks = []
    for i in range(spec.n_tests):
        r = int(rng.integers(0, R))
        trs, us, steps = _walk(regions[r], region_nu[r], rng, members)
        base = steps * float(np.exp(rng.normal(0.0, 0.3)))
        walks.append((trs, us, max(base, 1e-3)))
    raw_total = sum(w[2] for w in walks)
    target_s = spec.et_total_s if spec.et_total_s is not None else raw_total
    scale = target_s / raw_total

    enabled = frozenset(s for s in source_ids if rng.random() < 0.5)
    trigger = {s: float(rng.uniform(0.2, 0.8)) for s in source_ids}
    theory = MeasurementTheory.parse(spec.theory)
    profile_seed = int(rng.integers(0, 2**63 - 1))
    calib_seed = int(rng.integers(0, 2**63 - 1))

    def build(linkage):
        rates = _rates_for(region_nu, regions_of_unc, linkage, spec.base_rate, jitter)
        unc = {}
        for name, r in regions_of_unc.items():
            space = next(s for s, m in members.items() if name in m)
            mix = spec.um_linkage * rates[name] + (1.0 - spec.um_linkage) * belief_noise[name]
            measure = round(1.0 - 0.1 * mix, 6)
            unc[name] = Uncertainty(name, space, max(measure, 1e-6), unc_sources[name], rates[name])
        spaces = {s: UncertaintySpace(s, frozenset(m)) for s, m in members.items()}
        tests = []
        for i, (trs, us, base) in enumerate(walks):
            et = max(round(base * scale, 3), 0.001)
            tests.append(make_test(f"t{i + 1}", et, trs, us, unc, theory))
        suite = TestSuite(tests, spec.n_transitions, spec.n_uncertainties, spec.n_spaces,
                          unc, spaces, theory)
        profile = SimProfile(rates, unc_sources, enabled, trigger, spec.unknown_rate, profile_seed)
        return suite, profile

    linkage = spec.linkage
    achieved = None
    if spec.target_rho is not None:
        def rho_at(s):
            suite, profile = build(s)
            return measured_rho(suite, profile.with_seed(calib_seed))
        lo, hi = 0.0, 1.0
        r_lo, r_hi = rho_at(lo), rho_at(hi)
        if spec.target_rho <= r_lo:
            linkage, achieved = lo, r_lo
        elif spec.target_rho >= r_hi:
            linkage, achieved = hi, r_hi
        else:
            for _ in range(20):
                mid = (lo + hi) / 2.0
                r_mid = rho_at(mid)
                if r_mid < spec.target_rho:
                    lo = mid
                else:
                    hi = mid
            linkage = (lo + hi) / 2.0
            achieved = rho_at(linkage)
    suite, profile = build(linkage)
    meta = {"linkage": linkage, "region_nu": region_nu, "calibration_rho": achieved,
            "nou_multiplicity": True, "seed": int(seed)}
    profile = SimProfile(profile.rates, profile.sources, profile.enabled, profile.trigger_prob,
                         profile.unknown_rate, profile.rng_seed, meta)
    return suite, profile


def suite_diagnostics(suite: TestSuite, profile: SimProfile, replicate: int = 0) -> dict:
    """Average ET per observed and per specified uncertainty over the full suite."""
    outcomes = execute_sequence(suite.tests, profile, replicate)
    et = sum(t.et for t in suite.tests)
    nou = sum(o.nou for o in outcomes)
    nu = sum(t.nu for t in suite.tests)
    return {
        "avg_et_per_nou_full_suite": et / nou if nou else math.inf,
        "avg_et_per_nu_full_suite": et / nu if nu else math.inf,
        "rho_nu_nou": measured_rho(suite, profile, replicate),
    }
