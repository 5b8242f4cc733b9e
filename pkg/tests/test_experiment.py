import csv
import json

import numpy as np
import pytest

from helpers import build_suite
from oracles import brute_force_front, contained, small_suite
from uaprio import experiment
from uaprio.experiment import ConfigError, ExperimentPlan
from uaprio.objectives import ObjectiveVector, ProblemDef
from uaprio.search import SearchConfig, run
from uaprio.search.common import Front
from uaprio.sim import SuiteSpec, generate_synthetic_suite

PLAN = ExperimentPlan(problems=(6,), budgets=(50,), algorithms=("nsga2", "rs"), runs=3,
                      evaluations=300, population_size=12)


@pytest.fixture(scope="module")
def generated():
    return generate_synthetic_suite(SuiteSpec(n_tests=20), 11)


@pytest.fixture(scope="module")
def report(generated, tmp_path_factory):
    out = tmp_path_factory.mktemp("report")
    experiment.run_experiment(PLAN, *generated, out)
    return out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def tree(root):
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


def test_bookkeeping_counts(report):
    assert len(list((report / "fronts").glob("*.json"))) == 6
    rows = read_csv(report / "tables" / "rq1_vs_rs.csv")
    assert {(r["problem"], r["budget"], r["algorithm"]) for r in rows} == {("6", "50", "nsga2")}
    meta = json.loads((report / "metadata.json").read_text())
    assert meta["failures"] == [] and len(meta["cells"]) == 6
    assert len({c["seed"] for c in meta["cells"]}) == 6


def test_rerun_is_byte_identical(report, generated, tmp_path):
    experiment.run_experiment(PLAN, *generated, tmp_path)
    assert tree(tmp_path) == tree(report)


def test_stats_rebuilds_the_same_tables(report, tmp_path):
    before = tree(report / "tables")
    experiment.analyze(report)
    assert tree(report / "tables") == before


def test_tables_carry_provenance(report):
    # the budget correlation table stays empty with a single budget, its header still counts
    for path in (report / "tables").glob("*.csv"):
        with open(path, newline="") as fh:
            header = next(csv.reader(fh))
        for col in ("problem", "budget", "algorithm"):
            assert col in header, (path.name, col)
        # per-run tables name the exact seed, aggregate tables the seed range
        assert "seed_range" in header or {"run", "seed"} <= set(header), path.name


def test_confidence_rows_sum_to_hundred(report):
    for name in ("rq2_best_mosa.csv", "rq4_problem_rank.csv"):
        groups = {}
        for r in read_csv(report / "tables" / name):
            if name.startswith("rq4"):
                key = (r["algorithm"], r["budget"])
            else:
                key = (r["problem"], r["budget"], r["metric"])
            groups[key] = groups.get(key, 0.0) + float(r["confidence"])
        assert all(abs(v - 100) <= 0.01 for v in groups.values())


def test_indicator_rows_are_sane(report):
    rows = read_csv(report / "tables" / "indicators.csv")
    assert len(rows) == 6
    for r in rows:
        assert 0.0 <= float(r["hv"]) <= 1.0 and float(r["igd"]) >= 0.0
        assert float(r["anou"]) >= 0.0


def test_failed_cell_is_recorded_and_skipped(generated, tmp_path, monkeypatch):
    real = experiment.run_search

    def flaky(algorithm, *args, **kw):
        if algorithm == "rs":
            raise RuntimeError("boom")
        return real(algorithm, *args, **kw)

    monkeypatch.setattr(experiment, "run_search", flaky)
    meta = experiment.run_experiment(PLAN, *generated, tmp_path)
    assert len(meta["failures"]) == 3
    assert all("boom" in f["error"] for f in meta["failures"])
    assert len(list((tmp_path / "fronts").glob("*.json"))) == 3


@pytest.mark.parametrize("change", [dict(problems=(11,)), dict(budgets=(15,)),
                                    dict(algorithms=("sa",)), dict(runs=0), dict(pick="best")])
def test_bad_plans(change, generated, tmp_path):
    plan = ExperimentPlan(**{**PLAN.__dict__, **change})
    with pytest.raises(ConfigError):
        experiment.run_experiment(plan, *generated, tmp_path)


def test_missing_profile(generated, tmp_path):
    with pytest.raises(ConfigError, match="profile"):
        experiment.run_experiment(PLAN, generated[0], None, tmp_path)


def test_seeds_depend_only_on_coordinates():
    a = ExperimentPlan(seed=5)
    b = ExperimentPlan(seed=5, algorithms=("rs",), problems=(1, 6))
    assert a.cell_seed(6, 100, "rs", 2) == b.cell_seed(6, 100, "rs", 2)
    assert a.cell_seed(6, 100, "rs", 2) != a.cell_seed(6, 100, "rs", 1)
    assert a.cell_seed(6, 100, "rs", 2) != ExperimentPlan(seed=6).cell_seed(6, 100, "rs", 2)


def test_prioritize_defaults_on_safehome(safehome):
    suite, _ = safehome
    out = experiment.prioritize(suite, config=SearchConfig(max_evaluations=500, population_size=20))
    assert out["problem"] == 6 and out["budget"] == 100
    assert sorted(out["selected"]["sequence"]) == sorted(suite.test_ids)
    assert out["warnings"] == []
    assert out["selected"]["objectives"] in [s["objectives"] for s in out["solutions"]]


def test_prioritize_tiny_budget_warns():
    # each test alone needs a third of the total, far beyond 10%
    even = build_suite([10.0, 10.0, 10.0], us=[["u"], ["u"], ["u"]], measures={"u": 0.5})
    out = experiment.prioritize(even, 6, 10, config=SearchConfig(max_evaluations=50,
                                                                population_size=10))
    assert out["selected"]["sequence"] == []
    assert out["warnings"] == ["no test fits within the time budget"]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_knee_is_in_the_brute_force_set(seed):
    suite = small_suite(seed)
    problem = ProblemDef(6, 100)
    out = experiment.prioritize(suite, 6, 100, seed=seed)
    oracle = brute_force_front(problem, suite)
    assert contained(np.array([out["selected"]["objectives"]]), oracle).all()


def fake_front(values, problem_id=1):
    suite = small_suite(0)
    problem = ProblemDef(problem_id)
    base = run("rs", problem, suite, SearchConfig(max_evaluations=1))
    sol, vec = base.solutions[0]
    sols = [(sol, ObjectiveVector(tuple(v), vec.directions, problem_id)) for v in values]
    return Front(sols, "rs", 1), suite


def test_knee_ties_fall_back_to_pet():
    # AUM is constant, so both points sit at the same normalized sum
    front, suite = fake_front([(0.5, 1.0, 0.3), (0.2, 0.5, 0.3)])
    assert experiment.pick_solution(front, suite, "knee") == 1
    assert experiment.pick_solution(front, suite, "min-pet") == 1


def test_pick_single_point():
    front, suite = fake_front([(0.3, 0.3, 0.3)])
    for how in experiment.PICKS:
        assert experiment.pick_solution(front, suite, how) == 0
    with pytest.raises(ValueError):
        experiment.pick_solution(front, suite, "nope")


def test_update_appends_one_pass(safehome_path):
    doc = json.loads(safehome_path.read_text())
    experiment.append_observations(doc)
    experiment.append_observations(doc)
    for u in doc["uncertainties"]:
        assert [o["replicate"] for o in u["observed"]] == [0, 1]
        for o in u["observed"]:
            assert o["occurrences"] <= o["visits"]
    from uaprio.io import suite_from_dict
    suite_from_dict(doc)  # still schema valid


def test_presets():
    spec = experiment.preset_spec("AW4")
    assert (spec.n_tests, spec.et_total_s, spec.target_rho) == (296, 1655.0, 0.86)
    with pytest.raises(ConfigError):
        experiment.preset_spec("zz9")
