"""Shared machinery for the search algorithms: configuration, evaluation
accounting, variation operators and front construction."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .. import _backend
from ..objectives import (ObjectiveVector, PrioritizedSolution, ProblemDef,
                          encode_suite)
from ..suite import TestSuite


class DegenerateSuiteError(ValueError):
    """The suite is too small to search over."""


@dataclass(frozen=True)
class SearchConfig:
    population_size: int = 100
    max_evaluations: int = 25000
    crossover_rate: float = 0.9
    mutation_rate: float | None = None  # None means 1/n
    archive_size: int = 100
    feedback: int = 20
    de_cr: float = 0.5
    de_f: float = 0.5
    rng_seed: int = 0
    runs: int = 100
    initial_population: tuple | None = None

    def mutation_for(self, n: int) -> float:
        return 1.0 / n if self.mutation_rate is None else float(self.mutation_rate)

    def replace(self, **changes) -> "SearchConfig":
        data = {k: getattr(self, k) for k in self.__dataclass_fields__}
        data.update(changes)
        return SearchConfig(**data)


@dataclass
class Front:
    """Mutually nondominated solutions, one per distinct objective vector."""

    solutions: list
    algorithm: str = ""
    evaluations: int = 0
    history: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.solutions)

    @property
    def values(self) -> np.ndarray:
        if not self.solutions:
            return np.zeros((0, 0))
        return np.array([vec.values for _, vec in self.solutions], dtype=np.float64)

    @property
    def permutations(self) -> list:
        return [sol.permutation for sol, _ in self.solutions]

    def vector_set(self) -> set:
        return {vec.values for _, vec in self.solutions}


class Evaluator:
    """Counts every fitness evaluation and returns raw and min-oriented values."""

    def __init__(self, problem: ProblemDef, suite: TestSuite):
        self.problem = problem
        self.suite = suite
        self.enc = encode_suite(suite)
        self.codes = np.array([int(m) for m in problem.measures], dtype=np.int32)
        frac: Fraction = problem.budget_fraction
        self.num, self.den = frac.numerator, frac.denominator
        self.signs = problem.signs()
        self.count = 0

    def __call__(self, perms: np.ndarray):
        perms = np.ascontiguousarray(perms, dtype=np.int32)
        raw, mts = _backend.kernels.evaluate_batch(perms, self.enc, self.num, self.den, self.codes)
        self.count += perms.shape[0]
        return raw, raw * self.signs, mts


class SearchContext:
    def __init__(self, problem: ProblemDef, suite: TestSuite, config: SearchConfig, name: str):
        if len(suite) < 2:
            raise DegenerateSuiteError("search needs a suite with at least 2 tests")
        if config.max_evaluations < 1:
            raise ValueError("max_evaluations must be at least 1")
        self.problem = problem
        self.suite = suite
        self.config = config
        self.name = name
        self.n = len(suite)
        self.rng = np.random.default_rng(np.random.SeedSequence(int(config.rng_seed)))
        self.evaluate = Evaluator(problem, suite)
        self.mutation_rate = config.mutation_for(self.n)
        self.history: list = []

    @property
    def remaining(self) -> int:
        return self.config.max_evaluations - self.evaluate.count

    def initial_perms(self, size: int) -> np.ndarray:
        if self.config.initial_population is not None:
            init = np.asarray(self.config.initial_population, dtype=np.int32)
            reps = int(math.ceil(size / len(init)))
            return np.ascontiguousarray(np.tile(init, (reps, 1))[:size])
        return self.random_perms(size)

    def random_perms(self, size: int) -> np.ndarray:
        base = np.tile(np.arange(self.n, dtype=np.int32), (size, 1))
        return np.ascontiguousarray(self.rng.permuted(base, axis=1))

    def distinct_pairs(self, pool: int, count: int):
        a = self.rng.integers(0, pool, count)
        if pool < 2:
            return a, a.copy()
        b = self.rng.integers(0, pool - 1, count)
        b = b + (b >= a)
        return a, b

    def crossover(self, p1: np.ndarray, p2: np.ndarray):
        rows = p1.shape[0]
        do = self.rng.random(rows) < self.config.crossover_rate
        c1 = self.rng.integers(0, self.n, rows)
        c2 = self.rng.integers(0, self.n - 1, rows)
        c2 = c2 + (c2 >= c1)
        lo = np.minimum(c1, c2)
        hi = np.maximum(c1, c2)
        return _backend.kernels.pmx_batch(p1, p2, lo, hi, do)

    def mutate(self, perms: np.ndarray) -> np.ndarray:
        mask = self.rng.random(perms.shape) < self.mutation_rate
        partner = self.rng.integers(0, self.n - 1, perms.shape)
        return _backend.kernels.swap_mutation(perms, mask, partner)

    def record(self, F_front: np.ndarray):
        """Best min-oriented value of each objective among the current elite."""
        if len(F_front):
            self.history.append(tuple(float(v) for v in F_front.min(axis=0)))

    def front(self, perms, raw, mts, meta=None) -> Front:
        return build_front(self.problem, perms, raw, mts, self.name,
                           self.evaluate.count, self.history, meta or {})


def crowding_distance(F: np.ndarray) -> np.ndarray:
    size = F.shape[0]
    cd = np.zeros(size)
    if size <= 2:
        cd[:] = np.inf
        return cd
    for k in range(F.shape[1]):
        order = np.argsort(F[:, k], kind="stable")
        vals = F[order, k]
        cd[order[0]] = np.inf
        cd[order[-1]] = np.inf
        span = vals[-1] - vals[0]
        if span > 0:
            cd[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return cd


def rank_and_crowding(F: np.ndarray):
    rank = _backend.kernels.nondominated_rank(F)
    crowd = np.zeros(F.shape[0])
    for r in np.unique(rank):
        idx = np.flatnonzero(rank == r)
        crowd[idx] = crowding_distance(F[idx])
    return rank, crowd


def dominates_rows(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Row-wise Pareto dominance of min-oriented vectors."""
    return np.all(A <= B, axis=1) & np.any(A < B, axis=1)


def nondominated_mask(F: np.ndarray) -> np.ndarray:
    return _backend.kernels.nondominated_rank(F) == 0


def build_front(problem: ProblemDef, perms, raw, mts, name="", evaluations=0,
                history=None, meta=None) -> Front:
    perms = np.asarray(perms)
    raw = np.asarray(raw, dtype=np.float64)
    if raw.shape[0] == 0:
        return Front([], name, evaluations, list(history or []), dict(meta or {}))
    keep = np.flatnonzero(nondominated_mask(raw * problem.signs()))
    best: dict = {}
    for i in keep.tolist():
        key = tuple(raw[i].tolist())
        perm = tuple(perms[i].tolist())
        if key not in best or perm < best[key][0]:
            best[key] = (perm, int(mts[i]))
    solutions = []
    for key in sorted(best):
        perm, mt = best[key]
        solutions.append((PrioritizedSolution(perm, mt, problem.budget_fraction),
                          ObjectiveVector(key, problem.directions, problem.id)))
    return Front(solutions, name, evaluations, list(history or []), dict(meta or {}))


def grid_shape(size: int) -> tuple[int, int]:
    rows = int(math.isqrt(size))
    while size % rows:
        rows -= 1
    return rows, size // rows


def moore_neighbourhood(rows: int, cols: int) -> np.ndarray:
    """Index table (cell, 9): the cell itself followed by its 8 torus neighbours."""
    offsets = [(0, 0), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)]
    table = np.empty((rows * cols, len(offsets)), dtype=np.int64)
    for r in range(rows):
        for c in range(cols):
            cell = r * cols + c
            for k, (dr, dc) in enumerate(offsets):
                table[cell, k] = ((r + dr) % rows) * cols + (c + dc) % cols
    return table


OPERATORS = {
    "permutation": {"encoding": "permutation", "crossover": "PMX", "mutation": "swap (per position)"},
    "random_key": {"encoding": "random-key (argsort decode)", "recombination": "DE/rand/1/bin"},
}


def tournament_by_rank(ctx: SearchContext, rank, crowd, count: int) -> np.ndarray:
    """Binary tournament on (lower rank, larger crowding), coin on exact ties."""
    a, b = ctx.distinct_pairs(len(rank), count)
    coin = ctx.rng.random(count) < 0.5
    a_wins = (rank[a] < rank[b]) | ((rank[a] == rank[b]) & (
        (crowd[a] > crowd[b]) | ((crowd[a] == crowd[b]) & coin)))
    return np.where(a_wins, a, b)


def tournament_by_fitness(ctx: SearchContext, fitness, count: int) -> np.ndarray:
    a, b = ctx.distinct_pairs(len(fitness), count)
    coin = ctx.rng.random(count) < 0.5
    a_wins = (fitness[a] < fitness[b]) | ((fitness[a] == fitness[b]) & coin)
    return np.where(a_wins, a, b)


def neighbourhood_tournament(ctx: SearchContext, F, neigh, cells) -> np.ndarray:
    """For each cell pick two distinct neighbours (excluding itself) and keep
    the dominating one, or a random one when they are incomparable."""
    width = neigh.shape[1] - 1
    a, b = ctx.distinct_pairs(width, len(cells))
    ia = neigh[cells, a + 1]
    ib = neigh[cells, b + 1]
    coin = ctx.rng.random(len(cells)) < 0.5
    a_dom = dominates_rows(F[ia], F[ib])
    b_dom = dominates_rows(F[ib], F[ia])
    return np.where(a_dom | (~b_dom & coin), ia, ib)


class CrowdingArchive:
    """Bounded nondominated archive with crowding-distance truncation.

    ``extra`` carries per-member data that is not part of the genotype, such
    as the key vectors of a random-key encoding.
    """

    def __init__(self, ctx: SearchContext, capacity: int):
        self.ctx = ctx
        self.capacity = capacity
        n = ctx.n
        m = ctx.problem.n_objectives
        self.perms = np.zeros((0, n), dtype=np.int32)
        self.raw = np.zeros((0, m))
        self.F = np.zeros((0, m))
        self.mts = np.zeros(0, dtype=np.int64)
        self.extra = None

    def __len__(self):
        return len(self.F)

    def insert(self, perms, raw, F, mts, extra=None):
        pool_perms = np.vstack([self.perms, perms])
        pool_F = np.ascontiguousarray(np.vstack([self.F, F]))
        members = np.arange(len(self.F), dtype=np.int64)
        candidates = np.arange(len(self.F), len(pool_F), dtype=np.int64)
        tiebreak = self.ctx.rng.random(len(pool_F))
        keep = _backend.kernels.archive_insert(pool_F, pool_perms, members, candidates,
                                               self.capacity, tiebreak)
        self.perms = pool_perms[keep]
        self.raw = np.vstack([self.raw, raw])[keep]
        self.F = pool_F[keep]
        self.mts = np.concatenate([self.mts, mts])[keep]
        if extra is not None:
            pool_extra = extra if self.extra is None else np.vstack([self.extra, extra])
            self.extra = pool_extra[keep]

    def tournament(self, count: int) -> np.ndarray:
        """Binary tournament on crowding distance."""
        crowd = crowding_distance(self.F)
        a, b = self.ctx.distinct_pairs(len(self.F), count)
        coin = self.ctx.rng.random(count) < 0.5
        a_wins = (crowd[a] > crowd[b]) | ((crowd[a] == crowd[b]) & coin)
        return np.where(a_wins, a, b)
