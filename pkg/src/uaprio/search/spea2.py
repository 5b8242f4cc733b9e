"""SPEA2: strength fitness, k-th nearest neighbour density and archive truncation."""
import math

import numpy as np

from .. import _backend
from .common import OPERATORS, SearchConfig, SearchContext, tournament_by_fitness


def spea2_fitness(F: np.ndarray) -> np.ndarray:
    """Raw strength fitness plus density; values below 1 are nondominated."""
    size = F.shape[0]
    k = max(1, min(int(math.isqrt(size)), size - 1))
    return _backend.kernels.spea2_fitness(np.ascontiguousarray(F), k)


def environmental_selection(F, fitness, capacity, tiebreak) -> np.ndarray:
    """Indices of the next archive."""
    nondom = np.flatnonzero(fitness < 1.0)
    if len(nondom) <= capacity:
        order = np.lexsort((tiebreak, fitness))
        return order[:capacity] if len(nondom) < capacity else nondom
    keep = _backend.kernels.spea2_truncate(
        np.ascontiguousarray(F[nondom]), capacity, np.ascontiguousarray(tiebreak[nondom]))
    return nondom[keep]


def run_spea2(problem, suite, config: SearchConfig = SearchConfig()):
    ctx = SearchContext(problem, suite, config, "spea2")
    size = min(config.population_size, config.max_evaluations)
    capacity = config.archive_size
    pop = ctx.initial_perms(size)
    raw, F, mts = ctx.evaluate(pop)
    arch = (pop[:0], raw[:0], F[:0], mts[:0])

    while True:
        u_pop = np.vstack([arch[0], pop])
        u_raw = np.vstack([arch[1], raw])
        u_F = np.vstack([arch[2], F])
        u_mts = np.concatenate([arch[3], mts])
        fitness = spea2_fitness(u_F)
        chosen = environmental_selection(u_F, fitness, capacity, ctx.rng.random(len(u_F)))
        arch = (u_pop[chosen], u_raw[chosen], u_F[chosen], u_mts[chosen])
        arch_fit = fitness[chosen]
        ctx.record(arch[2][arch_fit < 1.0])
        if ctx.remaining <= 0:
            break
        batch = min(size, ctx.remaining)
        pairs = (batch + 1) // 2
        p1 = tournament_by_fitness(ctx, arch_fit, pairs)
        p2 = tournament_by_fitness(ctx, arch_fit, pairs)
        c1, c2 = ctx.crossover(arch[0][p1], arch[0][p2])
        pop = ctx.mutate(np.vstack([c1, c2])[:batch])
        raw, F, mts = ctx.evaluate(pop)

    best = arch_fit < 1.0
    return ctx.front(arch[0][best], arch[1][best], arch[3][best], dict(OPERATORS["permutation"]))
