"""Small hand-built suites for unit tests."""
from __future__ import annotations

from pathlib import Path

from uaprio.suite import (MeasurementTheory, TestSuite, Transition, Uncertainty,
                          UncertaintySpace, make_test)

DATA = Path(__file__).parent / "data"


def build_suite(ets, transitions=None, us=None, measures=None, spaces=None, ntr=None,
                nuu=None, nusp=None, theory=MeasurementTheory.UNCERTAINTY):
    """Suite from parallel per-test lists.

    ``transitions`` holds event names per test, ``us`` uncertainty ids per
    test, ``measures`` maps uncertainty id to measure and ``spaces`` maps it
    to a space id (one space per uncertainty by default).
    """
    n = len(ets)
    transitions = transitions or [[f"e{i}"] for i in range(n)]
    us = us or [[] for _ in range(n)]
    ids = sorted({u for row in us for u in row} | set(measures or {}))
    measures = {u: (measures or {}).get(u, 1.0) for u in ids}
    spaces = spaces or {u: f"sp_{u}" for u in ids}
    unc = {u: Uncertainty(u, spaces[u], measures[u]) for u in ids}
    members: dict[str, set] = {}
    for u, s in spaces.items():
        members.setdefault(s, set()).add(u)
    sp = {s: UncertaintySpace(s, frozenset(m)) for s, m in members.items()}
    tests = [make_test(f"t{i + 1}", ets[i], [Transition(e, "A", "B") for e in transitions[i]],
                       us[i], unc, theory) for i in range(n)]
    all_tr = {e for row in transitions for e in row}
    return TestSuite(tests, ntr or max(1, len(all_tr)), nuu or max(1, len(ids)),
                     nusp or max(1, len(sp)), unc, sp, theory)
