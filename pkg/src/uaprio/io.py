"""Suite files: JSON schema checks, loading, and deterministic writing."""
from __future__ import annotations

import json
from decimal import Decimal
from importlib import resources
from pathlib import Path

import jsonschema

from .sim import SimProfile
from .suite import (MeasurementTheory, TestCase, TestSuite, Transition, Uncertainty,
                    UncertaintySpace, ValidationError, Violation, derive_um, seconds_to_ms,
                    validate_suite)

SCHEMA_VERSION = 1


class SuiteLoadError(ValidationError):
    """Schema or invariant failure while reading a suite file."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


def suite_schema() -> dict:
    text = resources.files("uaprio").joinpath("schema/suite-v1.json").read_text("utf-8")
    return json.loads(text)


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else ""


def check_schema(doc) -> list[str]:
    validator = jsonschema.Draft202012Validator(suite_schema())
    problems = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path))):
        path = list(err.absolute_path)
        where = _pointer(path)
        if len(path) >= 2 and path[0] == "tests" and isinstance(doc, dict):
            try:
                tid = doc["tests"][path[1]].get("id")
            except (IndexError, KeyError, AttributeError, TypeError):
                tid = None
            if tid is not None:
                where += f" (test {tid!r})"
        problems.append(f"{where or '/'}: {err.message}")
    return problems


def suite_from_dict(doc: dict, check: bool = True):
    """Build a validated suite and, when rates are present, its SimProfile."""
    problems = check_schema(doc)
    if problems:
        raise SuiteLoadError("suite file does not match the schema:\n  " + "\n  ".join(problems))
    theory = MeasurementTheory.parse(doc["measurement_theory"])
    spaces = {}
    for sp in doc["uncertainty_spaces"]:
        spaces[sp["id"]] = UncertaintySpace(sp["id"], frozenset(sp["members"]))
    uncertainties = {}
    for u in doc["uncertainties"]:
        uncertainties[u["id"]] = Uncertainty(u["id"], u["space"], float(u["measure"]),
                                             frozenset(u.get("sources", ())),
                                             float(u.get("rate", 0.0)))
    measures = {k: v.measure for k, v in uncertainties.items()}
    tests = []
    for t in doc["tests"]:
        us = tuple(t["uncertainties"])
        tr = frozenset(Transition(x["event"], x["source"], x["target"]) for x in t["transitions"])
        known = all(u in uncertainties for u in us)
        uu = frozenset(t["unique_uncertainties"]) if "unique_uncertainties" in t else frozenset(us)
        if "spaces" in t:
            usp = frozenset(t["spaces"])
        else:
            usp = frozenset(uncertainties[u].space_id for u in uu if u in uncertainties)
        if "um" in t:
            um = float(t["um"])
        elif known:
            um = derive_um(us, measures, theory)
        else:
            um = 1.0
        tests.append(TestCase(t["id"], seconds_to_ms(Decimal(str(t["execution_time_s"]))),
                              tr, us, uu, usp, um))
    totals = doc["model_totals"]
    suite = TestSuite(tests, totals["transitions"], totals["uncertainties"], totals["spaces"],
                      uncertainties, spaces, theory)
    if check:
        violations = validate_suite(suite)
        if violations:
            raise SuiteLoadError("suite violates model invariants:\n  "
                                 + "\n  ".join(map(str, violations)), violations)
    profile = None
    if any("rate" in u for u in doc["uncertainties"]):
        p = doc.get("profile", {})
        profile = SimProfile.from_suite(suite, p.get("enabled_sources", ()), p.get("trigger_prob"),
                                        p.get("unknown_rate", 0.02), p.get("rng_seed", 0))
    return suite, profile


def load_suite(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text("utf-8"))
    except FileNotFoundError:
        raise SuiteLoadError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise SuiteLoadError(f"{path}: not valid JSON ({exc})") from None
    return suite_from_dict(doc)


def _seconds(ms: int):
    value = Decimal(ms) / 1000
    return int(value) if value == value.to_integral_value() else float(value)


def suite_to_dict(suite: TestSuite, profile: SimProfile | None = None) -> dict:
    rates = profile.rates if profile is not None else {}
    doc = {
        "schema_version": SCHEMA_VERSION,
        "measurement_theory": suite.measurement_theory.value,
        "model_totals": {"transitions": suite.ntr, "uncertainties": suite.nuu, "spaces": suite.nusp},
        "uncertainty_spaces": [{"id": s.id, "members": sorted(s.members)}
                               for s in sorted(suite.spaces.values(), key=lambda s: s.id)],
        "uncertainties": [],
        "tests": [],
    }
    for u in sorted(suite.uncertainties.values(), key=lambda u: u.id):
        entry = {"id": u.id, "space": u.space_id, "measure": u.measure,
                 "sources": sorted(u.indeterminacy_sources)}
        if profile is not None:
            entry["rate"] = float(rates.get(u.id, u.occurrence_rate))
        doc["uncertainties"].append(entry)
    for t in suite.tests:
        doc["tests"].append({
            "id": t.id,
            "execution_time_s": _seconds(t.et_ms),
            "transitions": [{"event": x.id, "source": x.source_state, "target": x.target_state}
                            for x in sorted(t.tr, key=lambda x: (x.id, x.source_state, x.target_state))],
            "uncertainties": list(t.us),
        })
    if profile is not None:
        doc["profile"] = {"enabled_sources": sorted(profile.enabled),
                          "trigger_prob": {k: profile.trigger_prob[k] for k in sorted(profile.trigger_prob)},
                          "unknown_rate": profile.unknown_rate,
                          "rng_seed": int(profile.rng_seed)}
    return doc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def save_suite(path, suite: TestSuite, profile: SimProfile | None = None):
    Path(path).write_text(dumps(suite_to_dict(suite, profile)), "utf-8")


__all__ = ["SuiteLoadError", "Violation", "check_schema", "load_suite", "save_suite",
           "suite_from_dict", "suite_schema", "suite_to_dict"]
