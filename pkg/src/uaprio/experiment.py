"""Experiment runner, solution picking and report tables.

Every (problem, budget, algorithm, run) cell gets its own seed derived from
the master seed and the cell coordinates, so the worker count never changes
any result. Reports are written in a fixed order with no timestamps.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import indicators, sim, stats
from .io import SCHEMA_VERSION, dumps, load_suite, save_suite
from .objectives import BUDGETS, PROBLEMS, ProblemDef, anu_proxy
from .search import ALGORITHMS, MOSAS, SearchConfig
from .search import run as run_search
from .suite import TestSuite

PICKS = ("knee", "min-pet", "max-anou-proxy")
REPORT_VERSION = 1

PRESETS = {
    # name: (tests, total execution time in s, NU/NOU Spearman target)
    "aw1": (420, 7924, 0.02),
    "aw2": (776, 15250, 0.03),
    "aw3": (857, 567960, 0.44),
    "aw4": (296, 1655, 0.86),
    "gs1": (1799, 118755, 0.39),
}

DECISIONS = {
    "genome": "full permutation, budget applied by maximal-prefix truncation",
    "operators": {"nsga2/spea2/mocell": "PMX crossover + per-position swap mutation",
                  "cellde": "random keys, DE/rand/1/bin, stable argsort decode"},
    "pus_scale": "fraction in [0, 1]",
    "empty_uncertainty_um": 1.0,
    "hv_reference_point": "(1, ..., 1) after per-cell normalization",
    "reference_front": "nondominated union of all runs and algorithms per cell",
    "holm_family": "per (problem, budget) and metric",
    "nou_counting": "with multiplicity",
    "unknown_uncertainty": "per-test Bernoulli",
    "pick": "max normalized sum, ties by lower PET",
    "diagnostics_scope": "full suite",
}


class ConfigError(ValueError):
    """Invalid plan or command-line configuration (exit code 2)."""


def derive_seed(master: int, *coords: int) -> int:
    seq = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(int(c) for c in coords))
    return int(seq.generate_state(1, np.uint64)[0] >> np.uint64(1))


@dataclass(frozen=True)
class ExperimentPlan:
    problems: tuple = (6,)
    budgets: tuple = (100,)
    algorithms: tuple = ("nsga2", "rs")
    runs: int = 3
    seed: int = 0
    evaluations: int = 25000
    population_size: int = 100
    pick: str = "knee"

    def check(self):
        if not self.problems or not self.budgets or not self.algorithms:
            raise ConfigError("problems, budgets and algorithms must be non-empty")
        bad = [p for p in self.problems if p not in PROBLEMS]
        if bad:
            raise ConfigError(f"unknown problem ids {bad}")
        bad = [b for b in self.budgets if b not in BUDGETS]
        if bad:
            raise ConfigError(f"budgets must be among {list(BUDGETS)}, got {bad}")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ConfigError(f"unknown algorithms {bad}")
        if self.runs < 1 or self.evaluations < 1 or self.population_size < 1:
            raise ConfigError("runs, evaluations and population size must be positive")
        if self.pick not in PICKS:
            raise ConfigError(f"pick must be one of {PICKS}")

    @property
    def cells(self) -> list[tuple]:
        return [(p, b, a, r) for p in self.problems for b in self.budgets
                for a in self.algorithms for r in range(self.runs)]

    def cell_seed(self, problem, budget, algorithm, run) -> int:
        return derive_seed(self.seed, problem, budget, sorted(ALGORITHMS).index(algorithm), run)


def pick_solution(front, suite: TestSuite, how: str = "knee") -> int:
    """Index into ``front.solutions`` of the solution to execute."""
    if not front.solutions:
        raise ValueError("cannot pick from an empty front")
    vals = front.values
    dirs = front.solutions[0][1].directions
    norm = indicators.normalize(vals, (vals.min(axis=0), vals.max(axis=0)), dirs)
    total = norm.sum(axis=1)  # lower is better after normalization
    idx = list(range(len(vals)))
    if how == "knee":
        key = lambda i: (total[i], vals[i, 0], i)
    elif how == "min-pet":
        key = lambda i: (vals[i, 0], total[i], i)
    elif how == "max-anou-proxy":
        proxy = [anu_proxy(front.solutions[i][0], suite) for i in idx]
        key = lambda i: (-proxy[i], total[i], i)
    else:
        raise ValueError(f"unknown pick {how!r}")
    return min(idx, key=key)


def front_to_dict(front, suite: TestSuite, problem: ProblemDef, seed: int, pick: int | None) -> dict:
    ids = suite.test_ids
    sols = []
    for sol, vec in front.solutions:
        sols.append({"objectives": list(vec.values),
                     "prefix_len": sol.prefix_len,
                     "sequence": [ids[i] for i in sol.prefix],
                     "permutation": [ids[i] for i in sol.permutation]})
    return {"algorithm": front.algorithm, "problem": problem.id,
            "budget": int(round(problem.budget_percent)), "seed": seed,
            "objectives": list(problem.names),
            "directions": [d.value for d in problem.directions],
            "evaluations": front.evaluations, "operators": front.meta,
            "picked": pick, "solutions": sols}


def prioritize(suite: TestSuite, problem_id: int = 6, budget=100, algorithm: str = "nsga2",
               seed: int = 0, pick: str = "knee", config: SearchConfig | None = None) -> dict:
    problem = ProblemDef(problem_id, budget)
    config = (config or SearchConfig()).replace(rng_seed=seed)
    front = run_search(algorithm, problem, suite, config)
    chosen = pick_solution(front, suite, pick)
    out = front_to_dict(front, suite, problem, seed, chosen)
    sol, vec = front.solutions[chosen]
    out["selected"] = {"sequence": [suite.test_ids[i] for i in sol.prefix],
                       "objectives": list(vec.values)}
    out["warnings"] = [] if sol.prefix_len else ["no test fits within the time budget"]
    return out


def _run_cell(args):
    suite, plan, cell = args
    problem_id, budget, algorithm, run = cell
    seed = plan.cell_seed(*cell)
    config = SearchConfig(population_size=plan.population_size, max_evaluations=plan.evaluations,
                          archive_size=plan.population_size, rng_seed=seed)
    problem = ProblemDef(problem_id, budget)
    try:
        front = run_search(algorithm, problem, suite, config)
        chosen = pick_solution(front, suite, plan.pick)
        return cell, front_to_dict(front, suite, problem, seed, chosen), None
    except Exception as exc:  # recorded as a failed cell, the sweep goes on
        return cell, None, f"{type(exc).__name__}: {exc}\n{traceback.format_exc(limit=3)}"


def front_name(problem, budget, algorithm, run) -> str:
    return f"p{problem:02d}_tb{budget:03d}_{algorithm}_r{run:03d}.json"


def run_experiment(plan: ExperimentPlan, suite: TestSuite, profile, out_dir, jobs: int = 1) -> dict:
    plan.check()
    if profile is None:
        raise ConfigError("the suite has no simulation profile (uncertainty rates)")
    out = Path(out_dir)
    (out / "fronts").mkdir(parents=True, exist_ok=True)
    save_suite(out / "suite.json", suite, profile)
    tasks = [(suite, plan, cell) for cell in plan.cells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, tasks, chunksize=1))
    else:
        results = [_run_cell(t) for t in tasks]
    failures = []
    for cell, doc, err in results:
        if err is not None:
            failures.append({"cell": dict(zip(("problem", "budget", "algorithm", "run"), cell)),
                             "error": err.splitlines()[0]})
            continue
        (out / "fronts" / front_name(*cell)).write_text(dumps(doc), "utf-8")
    meta = {
        "report_version": REPORT_VERSION,
        "suite_schema_version": SCHEMA_VERSION,
        "plan": asdict(plan),
        "cells": [{"problem": c[0], "budget": c[1], "algorithm": c[2], "run": c[3],
                   "seed": plan.cell_seed(*c)} for c in plan.cells],
        "failures": failures,
        "decisions": DECISIONS,
        "profile_seed": int(profile.rng_seed),
    }
    (out / "metadata.json").write_text(dumps(meta), "utf-8")
    analyze(out)
    return meta


# ----------------------------------------------------------------- analysis

def _fmt(x):
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return repr(x)
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


def _write_csv(path: Path, header, rows):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    path.write_text(buf.getvalue(), "utf-8")


def _load_fronts(out: Path, meta: dict) -> dict:
    fronts = {}
    for c in meta["cells"]:
        key = (c["problem"], c["budget"], c["algorithm"], c["run"])
        path = out / "fronts" / front_name(*key)
        if path.exists():
            fronts[key] = json.loads(path.read_text("utf-8"))
    return fronts


def _significance_rows(samples_by_algo, baseline, maximize):
    """MOSA-vs-baseline comparisons with Holm over the family."""
    mosas = [a for a in sorted(samples_by_algo) if a != baseline]
    raw = [stats.mann_whitney_u(samples_by_algo[a], samples_by_algo[baseline])[1] for a in mosas]
    sig = stats.holm_bonferroni(raw) if raw else []
    rows = []
    for a, p, s in zip(mosas, raw, sig):
        a12 = stats.vargha_delaney_a12(samples_by_algo[a], samples_by_algo[baseline])
        wins = s and (a12 > 0.5 if maximize else a12 < 0.5)
        rows.append((a, p, a12, s, wins))
    return rows


def analyze(out_dir) -> dict:
    """Recompute every table from the stored fronts and suite."""
    out = Path(out_dir)
    meta = json.loads((out / "metadata.json").read_text("utf-8"))
    plan = ExperimentPlan(**{k: tuple(v) if isinstance(v, list) else v
                             for k, v in meta["plan"].items()})
    suite, profile = load_suite(out / "suite.json")
    fronts = _load_fronts(out, meta)
    tables = out / "tables"
    tables.mkdir(exist_ok=True)
    index = {t: i for i, t in enumerate(suite.test_ids)}

    records = {}
    for p in plan.problems:
        for b in plan.budgets:
            keys = [k for k in fronts if k[0] == p and k[1] == b and fronts[k]["solutions"]]
            if not keys:
                continue
            dirs = fronts[keys[0]]["directions"]
            ref = indicators.ReferenceFront.from_fronts(
                [[s["objectives"] for s in fronts[k]["solutions"]] for k in sorted(keys)], dirs)
            ref_norm = ref.normalize(ref.points)
            for k in sorted(keys):
                doc = fronts[k]
                pts = ref.normalize([s["objectives"] for s in doc["solutions"]])
                chosen = doc["solutions"][doc["picked"]]
                tests = [suite.tests[index[t]] for t in chosen["sequence"]]
                outcomes = sim.execute_sequence(tests, profile, replicate=k[3])
                records[k] = {
                    "seed": doc["seed"], "n_points": len(doc["solutions"]),
                    "hv": indicators.hypervolume(pts), "igd": indicators.igd(pts, ref_norm),
                    "anou": sim.anou(outcomes), "prefix_len": chosen["prefix_len"],
                    "trace": sim.anou_trace(outcomes),
                }

    _write_csv(tables / "indicators.csv",
               ["problem", "budget", "algorithm", "run", "seed", "n_points", "hv", "igd",
                "anou", "prefix_len"],
               [(k[0], k[1], k[2], k[3], r["seed"], r["n_points"], r["hv"], r["igd"], r["anou"],
                 r["prefix_len"]) for k, r in sorted(records.items())])
    trace_rows = []
    for k, r in sorted(records.items()):
        for frac, n, value in r["trace"]:
            trace_rows.append((k[0], k[1], k[2], k[3], r["seed"], frac, n, value))
    _write_csv(tables / "anou_trace.csv",
               ["problem", "budget", "algorithm", "run", "seed", "used_time_fraction",
                "prefix_len", "anou"],
               trace_rows)

    seeds = f"master={plan.seed};runs=0-{plan.runs - 1}"

    def joined(values):
        return ";".join(str(v) for v in values)

    def samples(p, b, metric, algos):
        return {a: [records[k][metric] for k in sorted(records)
                    if k[0] == p and k[1] == b and k[2] == a] for a in algos}

    # MOSA versus RS
    rows = []
    if "rs" in plan.algorithms:
        for p in plan.problems:
            for b in plan.budgets:
                for metric, maximize in (("hv", True), ("igd", False)):
                    s = samples(p, b, metric, plan.algorithms)
                    if any(len(v) == 0 for v in s.values()):
                        continue
                    for a, pv, a12, sig, wins in _significance_rows(s, "rs", maximize):
                        rows.append((p, b, a, metric, seeds, pv, a12, sig, wins))
    _write_csv(tables / "rq1_vs_rs.csv",
               ["problem", "budget", "algorithm", "metric", "seed_range", "p_value", "a12",
                "holm_significant", "better_than_rs"], rows)

    # best MOSA per cell
    rows = []
    mosas = [a for a in plan.algorithms if a in MOSAS]
    if len(mosas) >= 2 and plan.runs >= 2:
        for p in plan.problems:
            for b in plan.budgets:
                for metric, maximize in (("hv", True), ("igd", False)):
                    s = samples(p, b, metric, mosas)
                    if any(len(v) < 2 for v in s.values()):
                        continue
                    ranks = stats.rank_algorithms(s, maximize=maximize)
                    conf = stats.confidence(ranks)
                    for a in sorted(ranks):
                        rows.append((p, b, a, seeds, metric, ranks[a], conf[a]))
    _write_csv(tables / "rq2_best_mosa.csv",
               ["problem", "budget", "algorithm", "seed_range", "metric", "rank", "confidence"],
               rows)

    # budget versus ANOU
    rows = []
    if len(plan.budgets) >= 3:
        for p in plan.problems:
            for a in plan.algorithms:
                xs, ys = [], []
                for k in sorted(records):
                    if k[0] == p and k[2] == a:
                        xs.append(k[1])
                        ys.append(records[k]["anou"])
                if len(xs) >= 3:
                    c = stats.spearman(xs, ys)
                    rows.append((p, joined(plan.budgets), a, seeds, len(xs), c.rho, c.p_value,
                                 c.band))
    _write_csv(tables / "rq3_budget_anou_spearman.csv",
               ["problem", "budget", "algorithm", "seed_range", "n", "rho", "p_value", "band"],
               rows)

    # problems ranked by ANOU
    rows = []
    if len(plan.problems) >= 2 and plan.runs >= 2:
        for a in plan.algorithms:
            for b in plan.budgets:
                s = {f"{p}": [records[k]["anou"] for k in sorted(records)
                              if k[0] == p and k[1] == b and k[2] == a] for p in plan.problems}
                if any(len(v) < 2 for v in s.values()):
                    continue
                ranks = stats.rank_algorithms(s, maximize=True)
                conf = stats.confidence(ranks)
                for p in sorted(ranks, key=int):
                    rows.append((int(p), b, a, seeds, ranks[p], conf[p]))
    _write_csv(tables / "rq4_problem_rank.csv",
               ["problem", "budget", "algorithm", "seed_range", "rank", "confidence"], rows)

    d = sim.suite_diagnostics(suite, profile)
    _write_csv(tables / "suite_diagnostics.csv",
               ["problem", "budget", "algorithm", "seed_range", "metric", "value"],
               [("all", "100", "none", f"profile={profile.rng_seed};replicate=0", k, float(v))
                for k, v in d.items()])
    return records


def append_observations(doc: dict, replicate: int | None = None) -> dict:
    """Execute every test once and append per-uncertainty observed rates.

    Works on the raw suite document so unrelated fields survive the round
    trip. The replicate defaults to the number of passes already recorded.
    """
    from .io import suite_from_dict

    suite, profile = suite_from_dict(doc)
    if profile is None:
        raise ConfigError("the suite has no simulation profile (uncertainty rates)")
    if replicate is None:
        replicate = max((len(u.get("observed", ())) for u in doc["uncertainties"]), default=0)
    visits: dict[str, int] = {}
    hits: dict[str, int] = {}
    for outcome in sim.execute_sequence(suite.tests, profile, replicate):
        for uid, verdict in outcome.verdicts:
            if uid is None:
                continue
            visits[uid] = visits.get(uid, 0) + 1
            hits[uid] = hits.get(uid, 0) + int(verdict.observed)
    for u in doc["uncertainties"]:
        v = visits.get(u["id"], 0)
        h = hits.get(u["id"], 0)
        u.setdefault("observed", []).append(
            {"replicate": int(replicate), "visits": v, "occurrences": h,
             "rate": h / v if v else None})
    return doc


def preset_spec(name: str, theory: str = "UncertaintyTheory") -> "sim.SuiteSpec":
    try:
        n, total, rho = PRESETS[name.lower()]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return sim.SuiteSpec(n_tests=n, n_transitions=max(40, n // 5), n_uncertainties=max(30, n // 8),
                         n_spaces=max(15, n // 16), et_total_s=float(total), target_rho=rho,
                         theory=theory)


__all__ = ["ConfigError", "append_observations", "ExperimentPlan", "PICKS", "PRESETS", "analyze", "derive_seed",
           "pick_solution", "preset_spec", "prioritize", "run_experiment"]
