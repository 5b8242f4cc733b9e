"""Non-parametric tests, effect sizes and the significance-aware rank score.

The statistics are computed here; scipy only supplies the chi-squared,
normal and t distribution tails.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np
from scipy import stats as _dist

ALPHA = 0.05
EXACT_LIMIT = 400  # largest n*m handled by the exact U distribution


def rankdata(values) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    x = np.asarray(values, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    sx = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _tie_term(values) -> float:
    _, counts = np.unique(np.asarray(values, dtype=np.float64), return_counts=True)
    return float(np.sum(counts.astype(np.float64) ** 3 - counts))


def kruskal_wallis(samples: Sequence[Sequence[float]]) -> tuple[float, float]:
    """H statistic with tie correction and its chi-squared p-value."""
    if len(samples) < 2:
        raise ValueError("Kruskal-Wallis needs at least two groups")
    groups = [np.asarray(g, dtype=np.float64) for g in samples]
    if any(len(g) == 0 for g in groups):
        raise ValueError("Kruskal-Wallis groups must be non-empty")
    pooled = np.concatenate(groups)
    N = len(pooled)
    ranks = rankdata(pooled)
    h = 0.0
    start = 0
    for g in groups:
        r = ranks[start:start + len(g)].sum()
        h += r * r / len(g)
        start += len(g)
    h = 12.0 / (N * (N + 1)) * h - 3.0 * (N + 1)
    correction = 1.0 - _tie_term(pooled) / (N ** 3 - N) if N > 1 else 0.0
    if correction <= 0.0:
        return 0.0, 1.0
    h /= correction
    return h, float(_dist.chi2.sf(h, len(groups) - 1))


@lru_cache(maxsize=None)
def _u_counts(n: int, m: int) -> tuple:
    """Number of rank arrangements giving each U value, for samples of size n and m."""
    # f[i][j][u]: arrangements of i items of a and j of b with statistic u
    table = {}
    for i in range(n + 1):
        for j in range(m + 1):
            if i == 0 or j == 0:
                table[i, j] = [1]
                continue
            # the largest item belongs to a (beats all j of b) or to b
            top_a = [0] * j + table[i - 1, j]
            top_b = table[i, j - 1]
            size = max(len(top_a), len(top_b))
            table[i, j] = [(top_a[u] if u < len(top_a) else 0) + (top_b[u] if u < len(top_b) else 0)
                           for u in range(size)]
    return tuple(table[n, m])


def exact_u_pvalue(u: float, n: int, m: int) -> float:
    counts = _u_counts(n, m)
    total = math.comb(n + m, n)
    k = int(round(u))
    lower = sum(counts[:k + 1])
    upper = sum(counts[k:])
    return min(1.0, 2.0 * min(lower, upper) / total)


def mann_whitney_u(a, b) -> tuple[float, float]:
    """U statistic of ``a`` and its two-sided p-value."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        raise ValueError("Mann-Whitney needs non-empty samples")
    pooled = np.concatenate([a, b])
    ranks = rankdata(pooled)
    u = float(ranks[:n].sum() - n * (n + 1) / 2.0)
    ties = _tie_term(pooled)
    if ties == 0 and n * m <= EXACT_LIMIT:
        return u, exact_u_pvalue(u, n, m)
    N = n + m
    var = n * m / 12.0 * ((N + 1) - ties / (N * (N - 1)))
    if var <= 0:
        return u, 1.0
    z = (abs(u - n * m / 2.0) - 0.5) / math.sqrt(var)
    return u, float(min(1.0, 2.0 * _dist.norm.sf(z)))


def vargha_delaney_a12(a, b) -> float:
    """Probability that a draw from ``a`` exceeds one from ``b`` (ties count half)."""
    a = np.asarray(a, dtype=np.float64)
    sb = np.sort(np.asarray(b, dtype=np.float64))
    if len(a) == 0 or len(sb) == 0:
        raise ValueError("A12 needs non-empty samples")
    below = np.searchsorted(sb, a, side="left")
    upto = np.searchsorted(sb, a, side="right")
    greater = int(below.sum())
    equal = int((upto - below).sum())
    return (greater + 0.5 * equal) / (len(a) * len(sb))


@dataclass(frozen=True)
class Correlation:
    rho: float
    p_value: float
    band: str

    @property
    def defined(self) -> bool:
        return not math.isnan(self.rho)


def correlation_band(rho: float) -> str:
    if math.isnan(rho):
        return "undefined"
    r = abs(rho)
    if r > 0.9:
        return "very strong"
    if r >= 0.7:
        return "strong"
    if r >= 0.4:
        return "moderate"
    if r >= 0.1:
        return "weak"
    return "negligible"


def spearman(x, y) -> Correlation:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y) or len(x) < 3:
        raise ValueError("Spearman needs two equal-length samples of at least 3 values")
    rx = rankdata(x) - (len(x) + 1) / 2.0
    ry = rankdata(y) - (len(y) + 1) / 2.0
    sxx = float(np.dot(rx, rx))
    syy = float(np.dot(ry, ry))
    if sxx == 0.0 or syy == 0.0:
        return Correlation(math.nan, math.nan, "undefined")
    rho = float(np.dot(rx, ry)) / math.sqrt(sxx * syy)
    rho = max(-1.0, min(1.0, rho))
    df = len(x) - 2
    if abs(rho) == 1.0:
        p = 0.0
    else:
        t = rho * math.sqrt(df / (1.0 - rho * rho))
        p = float(2.0 * _dist.t.sf(abs(t), df))
    return Correlation(rho, p, correlation_band(rho))


def holm_bonferroni(p_values: Sequence[float], alpha: float = ALPHA) -> list[bool]:
    """Step-down rejections, returned in input order."""
    p = [float(v) for v in p_values]
    if any(not (0.0 <= v <= 1.0) for v in p):
        raise ValueError("p-values must lie in [0, 1]")
    m = len(p)
    order = sorted(range(m), key=lambda i: (p[i], i))
    out = [False] * m
    for step, i in enumerate(order):
        if p[i] <= alpha / (m - step):
            out[i] = True
        else:
            break
    return out


@dataclass(frozen=True)
class Comparison:
    group_a: str
    group_b: str
    p_value: float
    a12: float
    adjusted_significant: bool


def compare_all(samples: Mapping[str, Sequence[float]], alpha: float = ALPHA,
                adjust: bool = True) -> dict:
    """Pairwise Mann-Whitney + A12 over every unordered pair of labels.

    The family for Holm-Bonferroni is the full set of pairs passed in.
    Keys are ordered pairs, so (b, a) carries the A12 of b over a.
    """
    labels = sorted(samples)
    pairs = list(combinations(labels, 2))
    raw = [mann_whitney_u(samples[a], samples[b])[1] for a, b in pairs]
    sig = holm_bonferroni(raw, alpha) if adjust else [p < alpha for p in raw]
    out = {}
    for (a, b), p, s in zip(pairs, raw, sig):
        a12 = vargha_delaney_a12(samples[a], samples[b])
        out[a, b] = Comparison(a, b, p, a12, bool(s))
        out[b, a] = Comparison(b, a, p, vargha_delaney_a12(samples[b], samples[a]), bool(s))
    return out


def rank_algorithms(samples: Mapping[str, Sequence[float]], maximize: bool = True,
                    alpha: float = ALPHA, adjust_first: bool = True) -> dict[str, int]:
    """Significance-aware ordinal ranks; 1 is the worst tier.

    ``better(x, y)`` holds when the pair is significant and the effect size
    points towards ``x`` (above 0.5 for maximized metrics, below for
    minimized ones). With ``adjust_first`` the significance comes from
    Holm-Bonferroni over all pairs, otherwise from the raw p-value.
    """
    if len(samples) < 2:
        raise ValueError("ranking needs at least two algorithms")
    if any(len(v) < 2 for v in samples.values()):
        raise ValueError("each algorithm needs at least two observations")
    comp = compare_all(samples, alpha, adjust=adjust_first)

    def better(x, y):
        c = comp[x, y]
        significant = c.adjusted_significant if adjust_first else c.p_value < alpha
        return significant and (c.a12 > 0.5 if maximize else c.a12 < 0.5)

    algos = sorted(samples)
    n = len(algos)
    for i in range(n - 1):
        for j in range(i + 1, n):
            if better(algos[i], algos[j]):
                algos[i], algos[j] = algos[j], algos[i]
    rank = {algos[0]: 1}
    for i in range(1, n):
        step = 1 if better(algos[i], algos[i - 1]) else 0
        rank[algos[i]] = rank[algos[i - 1]] + step
    return rank


def confidence(ranks) -> list[float] | dict:
    """Each rank as a percentage of the rank total."""
    if isinstance(ranks, Mapping):
        total = sum(ranks.values())
        return {k: v / total * 100.0 for k, v in ranks.items()}
    ranks = list(ranks)
    if any(r < 1 for r in ranks):
        raise ValueError("ranks must be at least 1")
    total = sum(ranks)
    return [r / total * 100.0 for r in ranks]
