"""MOCell: a cellular GA on a torus with an external crowding archive.

Cells are updated synchronously; each generation every cell breeds one
offspring, the archive is offered all offspring in cell order, and then a
few archive members are fed back into random cells.
"""
import numpy as np

from .. import _backend
from .common import (OPERATORS, CrowdingArchive, SearchConfig, SearchContext,
                     grid_shape, moore_neighbourhood, neighbourhood_tournament)


def feedback(ctx, archive, arrays, extra_src=None):
    """Overwrite distinct random cells with distinct random archive members."""
    k = min(ctx.config.feedback, len(archive), len(arrays[0]))
    if k <= 0:
        return
    cells = ctx.rng.choice(len(arrays[0]), size=k, replace=False)
    picks = ctx.rng.choice(len(archive), size=k, replace=False)
    pop, raw, F, mts = arrays
    pop[cells] = archive.perms[picks]
    raw[cells] = archive.raw[picks]
    F[cells] = archive.F[picks]
    mts[cells] = archive.mts[picks]
    if extra_src is not None:
        extra_src[cells] = archive.extra[picks]


def run_mocell(problem, suite, config: SearchConfig = SearchConfig()):
    ctx = SearchContext(problem, suite, config, "mocell")
    size = min(config.population_size, config.max_evaluations)
    neigh = moore_neighbourhood(*grid_shape(size))
    pop = ctx.initial_perms(size)
    raw, F, mts = ctx.evaluate(pop)
    archive = CrowdingArchive(ctx, config.archive_size)
    archive.insert(pop, raw, F, mts)
    ctx.record(archive.F)

    while ctx.remaining > 0:
        batch = min(size, ctx.remaining)
        cells = np.arange(batch)
        p1 = neighbourhood_tournament(ctx, F, neigh, cells)
        if len(archive) > 1:
            mate = archive.perms[archive.tournament(batch)]
        else:
            mate = pop[neighbourhood_tournament(ctx, F, neigh, cells)]
        child, _ = ctx.crossover(pop[p1], mate)
        child = ctx.mutate(child)
        raw_o, F_o, mts_o = ctx.evaluate(child)

        replace = _backend.kernels.cell_replace(F, F_o, neigh[:batch],
                                                ctx.rng.random(batch), ctx.rng.random(batch))
        archive.insert(child, raw_o, F_o, mts_o)
        rows = cells[replace]
        pop[rows] = child[replace]
        raw[rows] = raw_o[replace]
        F[rows] = F_o[replace]
        mts[rows] = mts_o[replace]
        feedback(ctx, archive, (pop, raw, F, mts))
        ctx.record(archive.F)

    return ctx.front(archive.perms, archive.raw, archive.mts, dict(OPERATORS["permutation"]))
