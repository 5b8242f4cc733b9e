"""Command-line entry point.

Exit codes: 0 success, 1 suite validation failure, 2 configuration error,
3 experiment finished with some failed cells.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiment, sim
from .experiment import ConfigError
from .io import SuiteLoadError, dumps, save_suite, suite_from_dict
from .objectives import PROBLEMS
from .search import ALGORITHMS, DegenerateSuiteError, SearchConfig
from .suite import MeasurementTheory, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2, 3


def _read_doc(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text("utf-8"))
    except FileNotFoundError:
        raise SuiteLoadError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise SuiteLoadError(f"{path}: not valid JSON ({exc})") from None


def _load(path, theory=None):
    doc = _read_doc(path)
    if theory is not None and isinstance(doc, dict):
        doc["measurement_theory"] = theory.value
    return suite_from_dict(doc)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x.lower().removeprefix("tb")) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _name_list(text: str) -> tuple[str, ...]:
    names = tuple(x.strip().lower() for x in text.split(",") if x.strip())
    bad = [n for n in names if n not in ALGORITHMS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown algorithms {bad}; choose from {sorted(ALGORITHMS)}")
    return names


def _theory(text: str) -> MeasurementTheory:
    try:
        return MeasurementTheory.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _write(out, text: str):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, "utf-8")


def cmd_validate(args) -> int:
    suite, profile = _load(args.suite, args.theory)
    print(f"{args.suite}: ok ({len(suite)} tests, {suite.measurement_theory.value}, "
          f"simulation profile {'present' if profile else 'absent'})")
    return EXIT_OK


def cmd_prioritize(args) -> int:
    suite, _ = _load(args.suite, args.theory)
    config = SearchConfig(population_size=args.population, max_evaluations=args.evaluations,
                          archive_size=args.population)
    try:
        result = experiment.prioritize(suite, args.problem, args.budget, args.algorithm,
                                       args.seed, args.pick, config)
    except (ValueError, DegenerateSuiteError) as exc:
        raise ConfigError(str(exc)) from None
    for w in result["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    _write(args.out, dumps(result))
    return EXIT_OK


def cmd_experiment(args) -> int:
    suite, profile = _load(args.suite, args.theory)
    plan = experiment.ExperimentPlan(problems=args.problem, budgets=args.budget,
                                     algorithms=args.algorithm, runs=args.runs, seed=args.seed,
                                     evaluations=args.evaluations,
                                     population_size=args.population, pick=args.pick)
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    meta = experiment.run_experiment(plan, suite, profile, args.out, jobs=args.jobs)
    failed = meta["failures"]
    print(f"{len(plan.cells) - len(failed)}/{len(plan.cells)} cells written to {args.out}")
    for f in failed:
        print(f"failed cell {f['cell']}: {f['error']}", file=sys.stderr)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_stats(args) -> int:
    out = Path(args.out_dir)
    if not (out / "metadata.json").exists():
        raise ConfigError(f"{out} holds no experiment (metadata.json missing)")
    experiment.analyze(out)
    print(f"tables rewritten under {out / 'tables'}")
    return EXIT_OK


def cmd_generate(args) -> int:
    theory = (args.theory or MeasurementTheory.UNCERTAINTY).value
    if args.preset:
        spec = experiment.preset_spec(args.preset, theory)
    else:
        if args.tests is None:
            raise ConfigError("generate needs --tests or --preset")
        spec = sim.SuiteSpec(n_tests=args.tests, theory=theory)
    overrides = {"n_transitions": args.transitions, "n_uncertainties": args.uncertainties,
                 "n_spaces": args.spaces, "et_total_s": args.et_total, "n_regions": args.regions,
                 "linkage": args.linkage, "target_rho": args.target_rho}
    fields = {k: v for k, v in overrides.items() if v is not None}
    if args.tests is not None:
        fields["n_tests"] = args.tests
    if fields:
        spec = sim.SuiteSpec(**{**spec.__dict__, **fields})
    try:
        suite, profile = sim.generate_synthetic_suite(spec, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.out in (None, "-"):
        from .io import suite_to_dict
        sys.stdout.write(dumps(suite_to_dict(suite, profile)))
    else:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        save_suite(args.out, suite, profile)
        print(f"{args.out}: {len(suite)} tests, linkage {profile.meta['linkage']:.4f}",
              file=sys.stderr)
    return EXIT_OK


def cmd_update(args) -> int:
    doc = _read_doc(args.suite)
    experiment.append_observations(doc, args.replicate)
    _write(args.out or args.suite, dumps(doc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uaprio",
                                     description="Uncertainty-wise test prioritization under time budgets")
    sub = parser.add_subparsers(dest="command", required=True)

    def search_flags(p, multi: bool):
        if multi:
            p.add_argument("--problem", type=_int_list, default=(6,), help="comma list, e.g. 1,6,9")
            p.add_argument("--budget", type=_int_list, default=(100,), help="percentages, e.g. 10,50,100")
            p.add_argument("--algorithm", type=_name_list, default=("nsga2", "rs"))
        else:
            p.add_argument("--problem", type=int, default=6, choices=sorted(PROBLEMS))
            p.add_argument("--budget", type=float, default=100, help="percentage of total time")
            p.add_argument("--algorithm", default="nsga2", choices=sorted(ALGORITHMS))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--evaluations", type=int, default=25000)
        p.add_argument("--population", type=int, default=100)
        p.add_argument("--pick", choices=experiment.PICKS, default="knee")
        p.add_argument("--theory", type=_theory, default=None,
                       help="override the suite's measurement theory")

    p = sub.add_parser("validate", help="check a suite file")
    p.add_argument("suite")
    p.add_argument("--theory", type=_theory, default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("prioritize", help="search one problem and pick a sequence")
    p.add_argument("suite")
    search_flags(p, multi=False)
    p.add_argument("--out", default=None, help="output JSON (stdout by default)")
    p.set_defaults(func=cmd_prioritize)

    p = sub.add_parser("experiment", help="run a plan of cells and write the report tree")
    p.add_argument("suite")
    search_flags(p, multi=True)
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="report directory")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("stats", help="recompute tables from stored fronts")
    p.add_argument("out_dir")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("generate", help="write a synthetic suite with a simulation profile")
    p.add_argument("--preset", choices=sorted(experiment.PRESETS))
    p.add_argument("--tests", type=int)
    p.add_argument("--transitions", type=int)
    p.add_argument("--uncertainties", type=int)
    p.add_argument("--spaces", type=int)
    p.add_argument("--et-total", type=float, help="total execution time in seconds")
    p.add_argument("--regions", type=int)
    p.add_argument("--linkage", type=float)
    p.add_argument("--target-rho", type=float)
    p.add_argument("--theory", type=_theory, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("update", help="simulate one pass and append observed rates")
    p.add_argument("suite")
    p.add_argument("--replicate", type=int, default=None)
    p.add_argument("--out", default=None, help="write here instead of in place")
    p.set_defaults(func=cmd_update)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SuiteLoadError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConfigError, sim.SimConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
