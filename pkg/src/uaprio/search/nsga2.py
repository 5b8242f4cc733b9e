"""NSGA-II over permutation genomes."""
import numpy as np

from .common import (OPERATORS, SearchConfig, SearchContext, rank_and_crowding,
                     tournament_by_rank)


def run_nsga2(problem, suite, config: SearchConfig = SearchConfig()):
    ctx = SearchContext(problem, suite, config, "nsga2")
    size = min(config.population_size, config.max_evaluations)
    pop = ctx.initial_perms(size)
    raw, F, mts = ctx.evaluate(pop)
    rank, crowd = rank_and_crowding(F)
    ctx.record(F[rank == 0])

    while ctx.remaining > 0:
        batch = min(size, ctx.remaining)
        pairs = (batch + 1) // 2
        p1 = tournament_by_rank(ctx, rank, crowd, pairs)
        p2 = tournament_by_rank(ctx, rank, crowd, pairs)
        c1, c2 = ctx.crossover(pop[p1], pop[p2])
        off = ctx.mutate(np.vstack([c1, c2])[:batch])
        raw_o, F_o, mts_o = ctx.evaluate(off)

        pop = np.vstack([pop, off])
        raw = np.vstack([raw, raw_o])
        F = np.vstack([F, F_o])
        mts = np.concatenate([mts, mts_o])
        rank, crowd = rank_and_crowding(F)
        tiebreak = ctx.rng.random(len(F))
        keep = np.lexsort((tiebreak, -crowd, rank))[:size]
        pop, raw, F, mts = pop[keep], raw[keep], F[keep], mts[keep]
        rank, crowd = rank_and_crowding(F)
        ctx.record(F[rank == 0])

    best = rank == 0
    return ctx.front(pop[best], raw[best], mts[best], dict(OPERATORS["permutation"]))
