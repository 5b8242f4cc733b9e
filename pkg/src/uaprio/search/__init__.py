"""Search algorithms for the prioritization problems."""
from .cellde import run_cellde
from .common import DegenerateSuiteError, Front, SearchConfig
from .mocell import run_mocell
from .nsga2 import run_nsga2
from .random_search import run_random_search
from .spea2 import run_spea2

ALGORITHMS = {
    "nsga2": run_nsga2,
    "spea2": run_spea2,
    "mocell": run_mocell,
    "cellde": run_cellde,
    "rs": run_random_search,
}
MOSAS = ("nsga2", "spea2", "mocell", "cellde")


def run(algorithm: str, problem, suite, config: SearchConfig = SearchConfig()) -> Front:
    try:
        fn = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}") from None
    return fn(problem, suite, config)


__all__ = ["ALGORITHMS", "MOSAS", "DegenerateSuiteError", "Front", "SearchConfig", "run",
           "run_cellde", "run_mocell", "run_nsga2", "run_random_search", "run_spea2"]
