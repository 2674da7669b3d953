import json
import subprocess
import sys

import pytest

from cli_suite import EXPECTED_CODES, run_suite, write_fixtures
from hadamard_kit.cli import main


@pytest.fixture(scope="module")
def suite(tmp_path_factory):
    return run_suite(tmp_path_factory.mktemp("run1"))


def _report(suite, name):
    return json.loads(suite[name][1])


def test_suite_exit_codes(suite):
    assert {k: v[0] for k, v in suite.items()} == EXPECTED_CODES


def test_deterministic_reports(suite, tmp_path):
    again = run_suite(tmp_path)
    for name in suite:
        assert again[name][1] == suite[name][1], name
    assert "timestamp" not in _report(suite, "validate")


def test_timestamp_without_deterministic(tmp_path):
    write_fixtures(tmp_path)
    out = tmp_path / "v.json"
    main(["validate", "--space", str(tmp_path / "tripod.json"), "--samples", "50", "--out", str(out)])
    assert "timestamp" in json.loads(out.read_text())


def test_diagnose_reports(suite):
    monod = _report(suite, "diagnose_monod")["result"]
    assert monod["weak"]["status"] == "holds_on_sample"
    assert monod["boundedness"]["flag"] == "unbounded"
    alt = _report(suite, "diagnose_alt")["result"]
    for k in ("delta", "weak", "kakavandi"):
        assert alt[k]["status"] == "fails" and alt[k]["witnesses"]
    const = _report(suite, "diagnose_const")["result"]
    assert all(const[k]["status"] == "holds_on_sample" for k in ("delta", "weak", "kakavandi"))


def test_descent_reports(suite):
    p = _report(suite, "descent_e2")["result"]["final_point"]
    assert p["coords"] == pytest.approx([2 / 3, 2 / 3], abs=1e-5)
    assert _report(suite, "descent_tripod")["result"]["final_point"] == {"vertex": "o"}
    assert _report(suite, "descent_single")["result"]["final_point"]["coords"] == pytest.approx([0.7, -0.2], abs=1e-5)
    csv_text = suite["descent_csv"][1].decode()
    assert csv_text.splitlines()[0] == "iteration,objective,step,direction,derivative"


def test_other_reports(suite):
    assert _report(suite, "center")["result"]["center"]["coords"] == pytest.approx([0.0, 0.0], abs=2e-2)
    dual = _report(suite, "dual")["result"]
    assert dual["estimate"] == pytest.approx(1.0) and dual["exact_euclidean"] == pytest.approx(1.0)
    assert _report(suite, "witness")["result"]["status"] == "found"
    assert _report(suite, "monotonicity")["result"]["monotone"] is True


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"space": {"kind": "tripod",}}')
    assert main(["validate", "--space", str(bad)]) == 2
    assert "line 1, column" in capsys.readouterr().err
    neg = tmp_path / "neg.json"
    neg.write_text(json.dumps({"kind": "metric_tree", "vertices": ["a", "b"], "edges": [["a", "b", -1.0]]}))
    assert main(["validate", "--space", str(neg)]) == 2
    cyc = tmp_path / "cyc.json"
    cyc.write_text(json.dumps({"kind": "metric_tree", "vertices": ["a", "b", "c"],
                               "edges": [["a", "b", 1.0], ["b", "c", 1.0], ["c", "a", 1.0]]}))
    assert main(["validate", "--space", str(cyc)]) == 2
    assert main(["validate", "--space", str(tmp_path / "missing.json")]) == 2
    assert main(["validate"]) == 2
    assert main(["diagnose", "--space", '{"kind": "euclidean", "dim": 3}', "--trace",
                 json.dumps({"space": {"kind": "euclidean", "dim": 2},
                             "points": [{"coords": [0, 0]}, {"coords": [1, 1]}]}),
                 "--limit", '{"coords": [0, 0]}']) == 2
    assert main(["validate", "--space", '{"kind": "tripod"}', "--format", "csv"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_solver_failure_exit_code(tmp_path):
    out = tmp_path / "d.json"
    code = main(["descent", "--space", '{"kind": "euclidean", "dim": 2}', "--field",
                 '{"frechet": {"anchors": [{"coords": [0, 0]}, {"coords": [2, 0]}]}}',
                 "--start", '{"coords": [5, 5]}',
                 "--max-iters", "1", "--out", str(out), "--deterministic"])
    assert code == 3
    assert json.loads(out.read_text())["result"]["reason"] == "max_iters"


def test_console_script_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "hadamard_kit.cli", "validate", "--space",
                          '{"kind": "tripod"}', "--samples", "50", "--deterministic"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["result"]["passed"] is True
    assert "validate: pass" in res.stderr
