import json
import subprocess
import sys

import pytest

from spteleport.cli import EXIT_IO, EXIT_OK, EXIT_THRESHOLD, EXIT_USAGE, main, parse_grid


def run(*args):
    return main(list(args))


def test_parse_grid():
    assert parse_grid("1:5:1") == [1, 2, 3, 4, 5]
    assert parse_grid("1,2,5") == [1, 2, 5]
    assert len(parse_grid("1:100:1")) == 100


@pytest.mark.parametrize("bad", ["0:5:1", "5:1:1", "1:5:0", "a,b", "1:2"])
def test_bad_grid_exit_code(bad, tmp_path):
    assert run("fig1", "--grid", bad, "--out", str(tmp_path)) == EXIT_USAGE


def test_fig1_outputs(tmp_path):
    assert run("fig1", "--out", str(tmp_path)) == EXIT_OK
    rows = (tmp_path / "fig1.csv").read_text().splitlines()
    assert rows[0] == "alpha_sq,p_err" and len(rows) == 101
    manifest = json.loads((tmp_path / "fig1.manifest.json").read_text())
    assert manifest["command"] == "fig1" and manifest["config"]["grid"][-1] == 100


def test_fig1_rerun_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run("fig1", "--grid", "1,50,100", "--out", str(a))
    run("fig1", "--grid", "1,50,100", "--out", str(b))
    assert (a / "fig1.csv").read_bytes() == (b / "fig1.csv").read_bytes()


def test_teleport_ideal(tmp_path):
    assert run("teleport", "--ideal", "--trials", "50", "--seed", "9", "--out", str(tmp_path)) == EXIT_OK
    summary = json.loads((tmp_path / "teleport_summary.json").read_text())
    assert summary["trials"] == 50
    assert summary["checks"]["min_fidelity"]["passed"]
    assert len((tmp_path / "teleport_trials.csv").read_text().splitlines()) == 51


def test_teleport_rerun_byte_identical(tmp_path):
    for d in ("a", "b"):
        run("teleport", "--trials", "20", "--seed", "3", "--alpha-sq", "20", "--out", str(tmp_path / d))
    for name in ("teleport_summary.json", "teleport_trials.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_env_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv("SPTELEPORT_OUT", str(tmp_path / "env"))
    monkeypatch.setenv("SPTELEPORT_SEED", "77")
    assert run("teleport", "--ideal", "--trials", "5") == EXIT_OK
    summary = json.loads((tmp_path / "env" / "teleport_summary.json").read_text())
    assert summary["config"]["seed"] == 77
    # explicit flag beats the environment
    run("teleport", "--ideal", "--trials", "5", "--seed", "78")
    summary = json.loads((tmp_path / "env" / "teleport_summary.json").read_text())
    assert summary["config"]["seed"] == 78


def test_threshold_failure(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha_sq": 10, "trials": 20, "min_mean_fidelity": 0.9999}))
    assert run("teleport", "--config", str(cfg), "--out", str(tmp_path)) == EXIT_THRESHOLD


@pytest.mark.parametrize("content", ["{not json", json.dumps({"bogus": 1}), json.dumps([1, 2]),
                                     json.dumps({"trials": 0})])
def test_bad_config(content, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(content)
    assert run("teleport", "--config", str(cfg), "--out", str(tmp_path)) == EXIT_USAGE


def test_missing_config(tmp_path):
    assert run("gates", "--config", str(tmp_path / "nope.json")) == EXIT_USAGE


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert run("fig1", "--grid", "1,2", "--out", str(blocker / "sub")) == EXIT_IO


def test_unknown_flag_exit_code():
    with pytest.raises(SystemExit) as exc:
        run("teleport", "--frobnicate")
    assert exc.value.code == EXIT_USAGE


def test_analyze_ideal(tmp_path):
    assert run("analyze", "--ideal", "--trials", "30", "--out", str(tmp_path)) == EXIT_OK
    body = json.loads((tmp_path / "analyzer_confusion.json").read_text())
    for k in ("psi+", "psi-", "phi+", "phi-"):
        assert body["confusion_sampled"][k][k] == 1.0
    assert body["extra_inputs"]["01"]["exact"]["psi+"] == pytest.approx(0.5)
    lines = (tmp_path / "analyzer_audit.jsonl").read_text().splitlines()
    assert len(lines) == 5 * 30
    rec = json.loads(lines[0])
    assert {"input_label", "parity_signal", "branch", "outcome", "probabilities"} <= set(rec)


def test_analyze_custom_inputs(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"ideal_mode": True, "trials": 4,
                               "audit_inputs": {"11": [[0, 0], [0, 0], [0, 0], [1, 0]]}}))
    assert run("analyze", "--config", str(cfg), "--out", str(tmp_path)) == EXIT_OK
    body = json.loads((tmp_path / "analyzer_confusion.json").read_text())
    assert body["extra_inputs"]["11"]["exact"]["phi+"] == pytest.approx(0.5)


def test_gates_ideal(tmp_path):
    assert run("gates", "--ideal", "--out", str(tmp_path)) == EXIT_OK
    body = json.loads((tmp_path / "gates.json").read_text())
    assert body["passed"]
    assert {g["name"] for g in body["gates"]} == {"phase", "hadamard", "cs", "cnot"}


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "spteleport", "fig1", "--grid", "50", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "fig1.csv").exists()
