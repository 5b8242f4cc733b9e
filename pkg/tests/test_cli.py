import json

import pytest

from uaprio.cli import EXIT_CONFIG, EXIT_OK, EXIT_PARTIAL, EXIT_VALIDATION, main
from uaprio import experiment


@pytest.fixture
def generated(tmp_path):
    path = tmp_path / "suite.json"
    assert main(["generate", "--tests", "15", "--seed", "2", "--out", str(path)]) == EXIT_OK
    return path


def test_validate_ok(safehome_path, capsys):
    assert main(["validate", str(safehome_path)]) == EXIT_OK
    assert "3 tests" in capsys.readouterr().out


def test_validate_failure_names_the_test(safehome_path, tmp_path, capsys):
    doc = json.loads(safehome_path.read_text())
    del doc["tests"][2]["execution_time_s"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["validate", str(bad)]) == EXIT_VALIDATION
    assert "t3" in capsys.readouterr().err


def test_missing_file_is_a_validation_failure(tmp_path):
    assert main(["validate", str(tmp_path / "nope.json")]) == EXIT_VALIDATION


def test_prioritize_defaults(safehome_path, capsys):
    rc = main(["prioritize", str(safehome_path), "--evaluations", "300", "--population", "10"])
    assert rc == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["problem"] == 6 and out["budget"] == 100 and out["algorithm"] == "nsga2"
    assert out["selected"]["sequence"]


def test_prioritize_writes_file_and_theory_override(safehome_path, tmp_path):
    target = tmp_path / "o" / "result.json"
    assert main(["prioritize", str(safehome_path), "--problem", "1", "--theory", "probability",
                 "--evaluations", "100", "--population", "10", "--out", str(target)]) == EXIT_OK
    assert json.loads(target.read_text())["objectives"] == ["PET", "PTR", "AUM"]


def test_prioritize_tiny_budget_warns(safehome_path, capsys):
    rc = main(["prioritize", str(safehome_path), "--budget", "0.001", "--evaluations", "50",
               "--population", "10"])
    assert rc == EXIT_OK
    captured = capsys.readouterr()
    assert json.loads(captured.out)["selected"]["sequence"] == []
    assert "warning" in captured.err


@pytest.mark.parametrize("argv", [
    ["prioritize", "{s}", "--budget", "150"],
    ["experiment", "{s}", "--budget", "15", "--out", "{o}"],
    ["experiment", "{s}", "--jobs", "0", "--out", "{o}"],
    ["stats", "{o}"],
    ["generate"],
    ["generate", "--tests", "1"],
])
def test_configuration_errors(argv, safehome_path, tmp_path):
    argv = [a.format(s=safehome_path, o=tmp_path / "missing") for a in argv]
    assert main(argv) == EXIT_CONFIG


@pytest.mark.parametrize("argv", [["prioritize", "x", "--algorithm", "sa"],
                                  ["experiment", "x", "--algorithm", "nsga2,foo", "--out", "o"],
                                  ["bogus"]])
def test_argument_errors_exit_two(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == EXIT_CONFIG


def test_experiment_and_stats(generated, tmp_path, capsys):
    out = tmp_path / "report"
    rc = main(["experiment", str(generated), "--problem", "1,6", "--budget", "TB50,100",
               "--algorithm", "nsga2,rs", "--runs", "2", "--evaluations", "120",
               "--population", "10", "--out", str(out)])
    assert rc == EXIT_OK
    assert "16/16 cells" in capsys.readouterr().out
    assert len(list((out / "fronts").glob("*.json"))) == 16
    assert main(["stats", str(out)]) == EXIT_OK


def test_partial_failure_exit_code(generated, tmp_path, monkeypatch):
    real = experiment.run_search

    def flaky(algorithm, problem, *args, **kw):
        if problem.id == 6:
            raise RuntimeError("boom")
        return real(algorithm, problem, *args, **kw)

    monkeypatch.setattr(experiment, "run_search", flaky)
    rc = main(["experiment", str(generated), "--problem", "1,6", "--runs", "1",
               "--evaluations", "60", "--population", "10", "--out", str(tmp_path / "r")])
    assert rc == EXIT_PARTIAL


def test_experiment_without_profile(safehome_path, tmp_path):
    doc = json.loads(safehome_path.read_text())
    for u in doc["uncertainties"]:
        del u["rate"]
    plain = tmp_path / "plain.json"
    plain.write_text(json.dumps(doc))
    assert main(["experiment", str(plain), "--out", str(tmp_path / "r")]) == EXIT_CONFIG


def test_generate_preset_to_stdout(capsys):
    assert main(["generate", "--preset", "aw4", "--seed", "1"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["tests"]) == 296
    assert abs(sum(t["execution_time_s"] for t in doc["tests"]) - 1655) < 1.0


def test_generate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        main(["generate", "--tests", "30", "--linkage", "0.5", "--seed", "9", "--out", str(path)])
    assert a.read_bytes() == b.read_bytes()


def test_update_in_place_and_to_other_file(generated, tmp_path):
    assert main(["update", str(generated)]) == EXIT_OK
    doc = json.loads(generated.read_text())
    assert all(len(u["observed"]) == 1 for u in doc["uncertainties"])
    copy = tmp_path / "copy.json"
    assert main(["update", str(generated), "--replicate", "7", "--out", str(copy)]) == EXIT_OK
    assert json.loads(copy.read_text())["uncertainties"][0]["observed"][-1]["replicate"] == 7
    assert main(["validate", str(copy)]) == EXIT_OK
