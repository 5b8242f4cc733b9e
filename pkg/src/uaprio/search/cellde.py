"""CellDE: cellular differential evolution over random-key vectors.

Each solution is a vector of keys in [0, 1]; its permutation is the stable
argsort of the keys. Recombination is DE/rand/1/bin anchored on the cell's
own vector, with the two difference parents drawn from the neighbourhood.
"""
import numpy as np

from .. import _backend
from .common import (OPERATORS, CrowdingArchive, SearchConfig, SearchContext,
                     grid_shape, moore_neighbourhood, neighbourhood_tournament)
from .mocell import feedback


def decode(keys: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.argsort(keys, axis=1, kind="stable").astype(np.int32))


def encode(perms: np.ndarray) -> np.ndarray:
    """Keys whose stable argsort reproduces ``perms``."""
    perms = np.asarray(perms)
    n = perms.shape[1]
    keys = np.empty(perms.shape, dtype=np.float64)
    rows = np.arange(perms.shape[0])[:, None]
    keys[rows, perms] = (np.arange(n) + 0.5) / n
    return keys


def reflect(x: np.ndarray) -> np.ndarray:
    """Fold values back into [0, 1] by mirroring at the bounds."""
    x = np.abs(x)
    x = np.where(x > 1.0, 2.0 - x, x)
    return np.clip(x, 0.0, 1.0)


def run_cellde(problem, suite, config: SearchConfig = SearchConfig()):
    ctx = SearchContext(problem, suite, config, "cellde")
    size = min(config.population_size, config.max_evaluations)
    neigh = moore_neighbourhood(*grid_shape(size))
    if config.initial_population is not None:
        keys = encode(ctx.initial_perms(size))
    else:
        keys = ctx.rng.random((size, ctx.n))
    pop = decode(keys)
    raw, F, mts = ctx.evaluate(pop)
    archive = CrowdingArchive(ctx, config.archive_size)
    archive.insert(pop, raw, F, mts, extra=keys)
    ctx.record(archive.F)

    while ctx.remaining > 0:
        batch = min(size, ctx.remaining)
        cells = np.arange(batch)
        r1 = neighbourhood_tournament(ctx, F, neigh, cells)
        r2 = neighbourhood_tournament(ctx, F, neigh, cells)
        base = keys[cells]
        mutant = reflect(base + config.de_f * (keys[r1] - keys[r2]))
        cross = ctx.rng.random((batch, ctx.n)) < config.de_cr
        forced = ctx.rng.integers(0, ctx.n, batch)
        cross[cells, forced] = True
        trial = np.where(cross, mutant, base)
        child = decode(trial)
        raw_o, F_o, mts_o = ctx.evaluate(child)

        replace = _backend.kernels.cell_replace(F, F_o, neigh[:batch],
                                                ctx.rng.random(batch), ctx.rng.random(batch))
        archive.insert(child, raw_o, F_o, mts_o, extra=trial)
        rows = cells[replace]
        keys[rows] = trial[replace]
        pop[rows] = child[replace]
        raw[rows] = raw_o[replace]
        F[rows] = F_o[replace]
        mts[rows] = mts_o[replace]
        feedback(ctx, archive, (pop, raw, F, mts), extra_src=keys)
        ctx.record(archive.F)

    return ctx.front(archive.perms, archive.raw, archive.mts, dict(OPERATORS["random_key"]))
