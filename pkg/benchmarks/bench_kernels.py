"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--tests 200]

Every kernel is timed on identical inputs under both backends, and the
outputs are compared so a speedup never hides a divergence.
"""
import argparse
import timeit

import numpy as np

from uaprio import _backend
from uaprio.objectives import ProblemDef
from uaprio.search import SearchConfig, run
from uaprio.search.common import Evaluator
from uaprio.sim import SuiteSpec, generate_synthetic_suite


def cases(n_tests, rng):
    suite, _ = generate_synthetic_suite(SuiteSpec(n_tests=n_tests), 0)
    problem = ProblemDef(9, 50)
    ev = Evaluator(problem, suite)
    perms = np.array([rng.permutation(n_tests) for _ in range(100)], dtype=np.int32)
    F = ev(perms)[1]
    F200 = np.vstack([F, ev(perms[:, ::-1].copy())[1]])
    pts = rng.random((60, 4))

    def k():
        return _backend.kernels

    yield "evaluate_batch 100 perms", lambda: ev(perms)[0]
    yield "nondominated_rank 200x4", lambda: k().nondominated_rank(F200)
    yield "spea2_fitness 200x4", lambda: k().spea2_fitness(F200, 14)
    yield "hypervolume 60 pts 4-D", lambda: k().hypervolume(pts, np.ones(4))
    cfg = SearchConfig(max_evaluations=2000, rng_seed=1)
    yield "nsga2 run 2000 evals", lambda: run("nsga2", problem, suite, cfg).vector_set()
    yield "spea2 run 2000 evals", lambda: run("spea2", problem, suite, cfg).vector_set()


def same(a, b):
    if isinstance(a, (set, float, int)):
        return a == b
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--tests", type=int, default=200)
    args = ap.parse_args()
    if "cython" not in _backend.available():
        raise SystemExit("compiled kernels are not built (python3 setup.py build_ext --inplace)")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<28}{'python ms':>12}{'cython ms':>12}{'speedup':>10}  equal")
    for name, fn in cases(args.tests, rng):
        timing, result = {}, {}
        for backend in ("python", "cython"):
            with _backend.using(backend):
                result[backend] = fn()
                timing[backend] = min(timeit.repeat(fn, number=1, repeat=args.repeat)) * 1e3
        ratio = timing["python"] / timing["cython"]
        print(f"{name:<28}{timing['python']:>12.3f}{timing['cython']:>12.3f}{ratio:>9.1f}x  "
              f"{same(result['python'], result['cython'])}")


if __name__ == "__main__":
    main()
