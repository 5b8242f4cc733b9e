"""Independent reference computations used as test oracles.

Everything here is brute force over small inputs and shares no code with
the package beyond the scalar objective functions and the data model.
"""
from __future__ import annotations

import itertools

import numpy as np

from uaprio import objectives as obj
from uaprio.sim import SuiteSpec, generate_synthetic_suite

MEASURE_FN = {obj.Measure.AUM: obj.aum, obj.Measure.PUS: obj.pus,
              obj.Measure.ANU: obj.anu, obj.Measure.PUU: obj.puu}


def small_suite(seed: int):
    """Synthetic suite of 4 to 7 tests, small enough to enumerate."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 8))
    spec = SuiteSpec(n_tests=n, n_transitions=int(rng.integers(4, 10)),
                     n_uncertainties=int(rng.integers(2, 7)), n_spaces=2, n_regions=2,
                     nu_range=(1, 3))
    return generate_synthetic_suite(spec, seed)[0]


def all_measures(suite, tb) -> list[dict]:
    """One dict of every objective per distinct budget prefix."""
    seen = {}
    for perm in itertools.permutations(range(len(suite))):
        sol = obj.truncate_to_budget(perm, suite, tb)
        if sol.prefix in seen:
            continue
        row = {"PET": obj.pet(sol, suite), "PTR": obj.ptr(sol, suite)}
        for m, fn in MEASURE_FN.items():
            row[m.name] = fn(sol, suite)
        seen[sol.prefix] = row
    return list(seen.values())


def pareto_points(rows: list[dict], problem: obj.ProblemDef) -> np.ndarray:
    """Nondominated objective vectors by pairwise comparison."""
    names = problem.names
    pts = np.unique(np.array([[r[k] for k in names] for r in rows]), axis=0)
    signed = pts * problem.signs()  # minimize everything
    keep = []
    for i in range(len(signed)):
        le = np.all(signed <= signed[i], axis=1)
        lt = np.any(signed < signed[i], axis=1)
        if not np.any(le & lt):
            keep.append(i)
    return pts[keep]


def brute_force_front(problem: obj.ProblemDef, suite) -> np.ndarray:
    return pareto_points(all_measures(suite, problem.budget_fraction), problem)


def contained(points, reference, tol: float = 1e-9) -> np.ndarray:
    """For each point, whether some reference point equals it within ``tol``."""
    P = np.asarray(points, dtype=np.float64).reshape(-1, np.shape(reference)[1])
    R = np.asarray(reference, dtype=np.float64)
    if len(P) == 0:
        return np.zeros(0, dtype=bool)
    return np.any(np.all(np.abs(P[:, None, :] - R[None, :, :]) <= tol, axis=2), axis=1)


def exact_mwu_p(a, b) -> float:
    """Two-sided p-value by enumerating every split of the pooled ranks."""
    n, m = len(a), len(b)
    pooled = sorted(list(a) + list(b))
    rank = {v: i + 1 for i, v in enumerate(pooled)}  # no ties in callers
    observed = sum(rank[v] for v in a) - n * (n + 1) / 2
    us = [sum(c) - n * (n + 1) / 2 for c in itertools.combinations(range(1, n + m + 1), n)]
    lower = sum(u <= observed for u in us)
    upper = sum(u >= observed for u in us)
    return min(1.0, 2 * min(lower, upper) / len(us))


def a12_pairs(a, b) -> float:
    wins = 0.0
    for x in a:
        for y in b:
            wins += 1.0 if x > y else 0.5 if x == y else 0.0
    return wins / (len(a) * len(b))


def holm_reference(p, alpha=0.05) -> list[bool]:
    """Reject H_(1..k-1) where k is the first sorted index with p_(k) > alpha/(m-k+1)."""
    m = len(p)
    order = sorted(range(m), key=lambda i: (p[i], i))
    k = m
    for pos, i in enumerate(order):
        if p[i] > alpha / (m - pos):
            k = pos
            break
    rejected = set(order[:k])
    return [i in rejected for i in range(m)]


def monte_carlo_hv(points, samples: int, rng) -> float:
    """Fraction of the unit square dominated by a minimized 2-D front."""
    P = np.asarray(points)
    hits = 0
    chunk = 100_000
    for start in range(0, samples, chunk):
        u = rng.random((min(chunk, samples - start), 2))
        dom = np.zeros(len(u), dtype=bool)
        for p in P:
            dom |= (u[:, 0] >= p[0]) & (u[:, 1] >= p[1])
        hits += int(dom.sum())
    return hits / samples


def spearman_by_formula(x, y) -> float:
    """Classic 1 - 6 sum(d^2) / (n (n^2 - 1)) for tie-free data."""
    rx = np.argsort(np.argsort(x))
    ry = np.argsort(np.argsort(y))
    n = len(x)
    return 1.0 - 6.0 * float(np.sum((rx - ry) ** 2)) / (n * (n * n - 1))
