"""Uniform random sampling baseline."""
import numpy as np

from .common import SearchConfig, SearchContext, nondominated_mask

BATCH = 1000


def run_random_search(problem, suite, config: SearchConfig = SearchConfig()):
    ctx = SearchContext(problem, suite, config, "rs")
    best = None
    while ctx.remaining > 0:
        perms = ctx.random_perms(min(BATCH, ctx.remaining))
        raw, F, mts = ctx.evaluate(perms)
        if best is not None:
            perms = np.vstack([best[0], perms])
            raw = np.vstack([best[1], raw])
            F = np.vstack([best[2], F])
            mts = np.concatenate([best[3], mts])
        keep = np.flatnonzero(nondominated_mask(F))
        # one representative per objective vector keeps the merge set small
        _, first = np.unique(F[keep], axis=0, return_index=True)
        keep = keep[np.sort(first)]
        best = (perms[keep], raw[keep], F[keep], mts[keep])
        ctx.record(best[2])
    return ctx.front(best[0], best[1], best[3], {"sampling": "uniform permutations"})
