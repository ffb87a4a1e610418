import json
import shutil
import subprocess
import sys

import pytest

from conftest import FIXTURES
from sugracheck.cli import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, main

GOLDEN = FIXTURES / "golden"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", ["minkowski11", "freund_rubin"])
def test_golden_json(capsys, name):
    code, out, _ = run(capsys, "check", FIXTURES / f"{name}.json", "--format", "json")
    assert code == EXIT_PASS
    assert out == (GOLDEN / f"{name}.json").read_text()


@pytest.mark.parametrize("name", ["minkowski11", "freund_rubin"])
def test_golden_table(capsys, name):
    code, out, _ = run(capsys, "check", FIXTURES / f"{name}.json")
    assert code == EXIT_PASS
    assert out == (GOLDEN / f"{name}.txt").read_text()


def test_repeated_runs_are_byte_identical(capsys):
    outs = [run(capsys, "check", FIXTURES / "freund_rubin.json", "--format", "json")[1]
            for _ in range(3)]
    assert outs[0] == outs[1] == outs[2]


def test_report_files(capsys, tmp_path):
    path = tmp_path / "fr.json"
    code, out, _ = run(capsys, "check", FIXTURES / "freund_rubin.json", "--report", path)
    assert code == EXIT_PASS
    assert path.read_text() == (GOLDEN / "freund_rubin.json").read_text()
    assert (tmp_path / "fr.json.txt").read_text() == (GOLDEN / "freund_rubin.txt").read_text()


def test_anomaly_flag_on_freund_rubin(capsys):
    code, out, _ = run(capsys, "check", FIXTURES / "freund_rubin.json", "--anomaly",
                       "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_PASS and doc["options"]["anomaly"] is True
    assert doc["notes"]


def test_failing_residual_exit_code(capsys):
    code, out, err = run(capsys, "check", FIXTURES / "iia_polynomial.json", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_FAIL and doc["exit_code"] == EXIT_FAIL and not doc["passed"]
    assert "worst offender" in err
    assert doc["residuals"]["bianchi_G4"]["pass"]
    assert doc["residuals"]["trace_identity"]["pass"]


def test_loose_tolerance_turns_failure_into_pass(capsys):
    code, _, _ = run(capsys, "check", FIXTURES / "iia_polynomial.json", "--tol", "100")
    assert code == EXIT_PASS


def test_dimension_mismatch_is_input_error(capsys):
    code, out, err = run(capsys, "check", FIXTURES / "bad_dim9.json")
    assert code == EXIT_INPUT
    assert "chart.dim" in err and "line 3" in err
    assert out == ""


def test_malformed_json(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "theory": "m11",\n  metric: 1\n}\n')
    code, _, err = run(capsys, "check", p)
    assert code == EXIT_INPUT and "line 3" in err


@pytest.mark.parametrize("doc,needle", [
    ({"theory": "m12", "metric": "minkowski"}, "theory"),
    ({"theory": "m11"}, "metric"),
    ({"theory": "m11", "metric": {"family": "freund-rubin"}}, "f"),
    ({"theory": "iia-string", "metric": {"family": "freund-rubin", "f": 1}}, "freund-rubin"),
    ({"theory": "m11", "metric": "minkowski", "tolerances": {"nonsense": 1e-3}}, "tolerances"),
])
def test_schema_and_semantic_errors(capsys, tmp_path, doc, needle):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc, indent=2))
    code, _, err = run(capsys, "check", p)
    assert code == EXIT_INPUT
    assert needle in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "check", tmp_path / "nope.json")
    assert code == EXIT_INPUT and "nope.json" in err


def test_anomaly_on_ten_dimensional_theory_is_input_error(capsys):
    code, _, err = run(capsys, "check", FIXTURES / "iia_polynomial.json", "--anomaly")
    assert code == EXIT_INPUT and "anomaly" in err


def test_unknown_suite_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["identities", "astrology"])
    assert exc.value.code == 2


def test_bad_worker_count(capsys, monkeypatch):
    monkeypatch.setenv("SUGRACHECK_WORKERS", "zero")
    code, _, err = run(capsys, "check", FIXTURES / "minkowski11.json")
    assert code == EXIT_INPUT and "SUGRACHECK_WORKERS" in err


def test_workers_give_identical_reports(capsys, monkeypatch):
    path = FIXTURES / "iia_two_points.json"
    monkeypatch.setenv("SUGRACHECK_WORKERS", "1")
    one = run(capsys, "check", path, "--format", "json")
    monkeypatch.setenv("SUGRACHECK_WORKERS", "2")
    two = run(capsys, "check", path, "--format", "json")
    assert one == two
    assert json.loads(one[1])["probe_points"] == 2


def test_identities_deterministic(capsys):
    a = run(capsys, "identities", "sl2", "--seed", "42", "--trials", "5", "--format", "json")
    b = run(capsys, "identities", "sl2", "--seed", "42", "--trials", "5", "--format", "json")
    assert a == b and a[0] == EXIT_PASS
    doc = json.loads(a[1])
    assert doc["identities"]["moebius_group_law"] == {"passed": 5, "trials": 5,
                                                      "max_deviation": "exact"}


@pytest.mark.parametrize("suite", ["hodge", "clifford", "variation", "killing-equivalence",
                                   "reduction", "sl2"])
def test_every_suite_passes(capsys, suite):
    code, out, _ = run(capsys, "identities", suite, "--trials", "3")
    assert code == EXIT_PASS and "FAIL" not in out


def test_reduce_command(capsys):
    code, out, _ = run(capsys, "reduce", FIXTURES / "iia_polynomial.json", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_PASS, doc
    assert {"metric", "connection", "field_strength", "lagrangian", "chern_simons",
            "killing"} == set(doc["sections"])


def test_reduce_needs_potentials(capsys):
    code, _, err = run(capsys, "reduce", FIXTURES / "minkowski11.json")
    assert code == EXIT_INPUT and err


@pytest.mark.skipif(shutil.which("sugracheck") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["sugracheck", "check", str(FIXTURES / "bad_dim9.json")],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_INPUT
    proc = subprocess.run([sys.executable, "-m", "sugracheck.cli", "check",
                           str(FIXTURES / "minkowski11.json"), "--format", "json"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_PASS
    assert proc.stdout == (GOLDEN / "minkowski11.json").read_text()
