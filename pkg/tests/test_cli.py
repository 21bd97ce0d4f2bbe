"""CLI behaviour: subcommands, JSON output, exact exit codes."""

import json

import pytest

from parley.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def out_json(text):
    return json.loads(text)


# --- validate ---------------------------------------------------------------


def test_validate_ok(fixtures, capsys):
    code, out, err = run_cli(
        capsys, "validate", str(fixtures / "linear.ipd")
    )
    assert code == 0
    data = out_json(out)
    assert data["protocol"] == "linear"
    assert data["ok"] is True
    assert data["findings"] == []
    assert err == ""


def test_validate_reports_findings_with_code_1(tmp_path, capsys):
    bad = tmp_path / "bad.ipd"
    bad.write_text(
        "protocol bad\nroles {\n  a: process\n  b: process\n}\n"
        "messages {\n  pm m0: a -> ghost request\n}\n"
    )
    code, out, _ = run_cli(capsys, "validate", str(bad))
    assert code == 1
    data = out_json(out)
    assert data["ok"] is False
    assert any(f["code"] == "UNKNOWN_ROLE" for f in data["findings"])


def test_validate_parse_error_is_code_2(tmp_path, capsys):
    bad = tmp_path / "mangled.ipd"
    bad.write_text("protocol x\nchapters {\n}\n")
    code, out, err = run_cli(capsys, "validate", str(bad))
    assert code == 2
    assert out == ""
    assert err.startswith("error:") and "unknown section" in err


def test_missing_file_is_code_2(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "validate", str(tmp_path / "absent.ipd")
    )
    assert code == 2
    assert "error:" in err


# --- verify -----------------------------------------------------------------


def test_verify_ok(fixtures, capsys):
    code, out, _ = run_cli(capsys, "verify", str(fixtures / "linear.ipd"))
    assert code == 0
    data = out_json(out)
    assert data["ok"] is True
    assert data["nodes"] == 5
    assert data["deadlock_free"] is True
    assert data["proper_termination"] is True


def test_verify_deadlock_is_code_1(fixtures, capsys):
    code, out, _ = run_cli(
        capsys, "verify", str(fixtures / "crossing-sync.ipd")
    )
    assert code == 1
    data = out_json(out)
    assert data["deadlock_free"] is False
    assert data["deadlocks"][0]["witness"] == []


def test_verify_bound_hit_is_code_3(fixtures, capsys):
    code, out, _ = run_cli(
        capsys,
        "verify",
        str(fixtures / "contract-net.ipd"),
        "--max-nodes",
        "2",
    )
    assert code == 3
    data = out_json(out)
    assert data["bounded"] is False
    assert data["bound_reason"] == "max-nodes"
    assert data["deadlock_free"] is None


def test_verify_validation_failure_is_code_2(tmp_path, capsys):
    bad = tmp_path / "bad.ipd"
    bad.write_text(
        "protocol bad\nroles {\n  a: process\n  b: process\n}\n"
        "messages {\n  pm m0: a -> a request\n}\n"
    )
    code, _, err = run_cli(capsys, "verify", str(bad))
    assert code == 2
    assert "SELF_MESSAGE" in err


# --- simulate ---------------------------------------------------------------


def test_simulate_completes_with_code_0(fixtures, capsys):
    code, out, _ = run_cli(
        capsys,
        "simulate",
        str(fixtures / "linear.ipd"),
        "--seed",
        "7",
    )
    assert code == 0
    data = out_json(out)
    assert data["protocol"] == "linear"
    assert data["seed"] == 7
    assert data["status"] == "Completed"
    assert data["conformant"] is True
    assert data["events"] > 0


def test_simulate_unverified_without_force_is_code_1(fixtures, capsys):
    code, out, _ = run_cli(
        capsys, "simulate", str(fixtures / "crossing-sync.ipd")
    )
    assert code == 1
    data = out_json(out)
    assert data["status"] == "NotRun"
    assert "force" in data["reason"]
    assert data["verification"]["deadlock_free"] is False


def test_simulate_forced_deadlock_is_code_1(fixtures, capsys):
    code, out, _ = run_cli(
        capsys,
        "simulate",
        str(fixtures / "crossing-sync.ipd"),
        "--force",
    )
    assert code == 1
    data = out_json(out)
    assert data["status"] == "Stuck"
    assert data["conformant"] is True  # a stuck prefix still conforms


def test_simulate_writes_trace_and_summary(fixtures, tmp_path, capsys):
    out_dir = tmp_path / "runs"
    code, out, _ = run_cli(
        capsys,
        "simulate",
        str(fixtures / "linear.ipd"),
        "--seed",
        "3",
        "--out",
        str(out_dir),
    )
    assert code == 0
    trace_path = out_dir / "linear-s3.trace.jsonl"
    summary_path = out_dir / "linear-s3.summary.json"
    assert trace_path.exists() and summary_path.exists()
    records = [
        json.loads(line) for line in trace_path.read_text().splitlines()
    ]
    assert records[0]["conversation-id"] == "conv-linear-s3"
    summary = json.loads(summary_path.read_text())
    assert summary["status"] == "Completed"
    assert out_json(out)["trace"] == str(trace_path)


def test_simulate_with_registry(fixtures, capsys):
    code, out, _ = run_cli(
        capsys,
        "simulate",
        str(fixtures / "service-flow.ipd"),
        "--seed",
        "2",
        "--registry",
        str(fixtures / "registry.json"),
    )
    assert code == 0
    assert out_json(out)["status"] == "Completed"


def test_simulate_service_role_without_registry_is_code_2(fixtures, capsys):
    code, _, err = run_cli(
        capsys, "simulate", str(fixtures / "service-flow.ipd")
    )
    assert code == 2
    assert "registry" in err


def test_simulate_malformed_registry_is_code_2(fixtures, tmp_path, capsys):
    reg = tmp_path / "broken.json"
    reg.write_text("{oops")
    code, _, err = run_cli(
        capsys,
        "simulate",
        str(fixtures / "service-flow.ipd"),
        "--registry",
        str(reg),
    )
    assert code == 2
    assert "malformed registry" in err


def test_simulate_seed_changes_trace_bytes(fixtures, tmp_path, capsys):
    texts = {}
    for seed in ("1", "2"):
        out_dir = tmp_path / f"run{seed}"
        run_cli(
            capsys,
            "simulate",
            str(fixtures / "contract-net.ipd"),
            "--seed",
            seed,
            "--out",
            str(out_dir),
        )
        texts[seed] = (
            out_dir / f"contract-net-s{seed}.trace.jsonl"
        ).read_text()
    assert texts["1"] != texts["2"]


# --- export -----------------------------------------------------------------


def test_export_pnml_to_stdout(fixtures, capsys):
    code, out, _ = run_cli(
        capsys,
        "export",
        str(fixtures / "linear.ipd"),
        "--format",
        "pnml",
    )
    assert code == 0
    assert out.startswith("<?xml")
    assert "<pnml" in out


def test_export_dot_to_directory(fixtures, tmp_path, capsys):
    out_dir = tmp_path / "nets"
    code, out, _ = run_cli(
        capsys,
        "export",
        str(fixtures / "linear.ipd"),
        "--format",
        "dot",
        "--out",
        str(out_dir),
    )
    assert code == 0
    path = out_dir / "linear.dot"
    assert path.exists()
    assert out.strip() == str(path)
    assert path.read_text().startswith('digraph "linear"')


def test_export_requires_format(fixtures, capsys):
    with pytest.raises(SystemExit) as info:
        main(["export", str(fixtures / "linear.ipd")])
    assert info.value.code == 2  # argparse usage error


def test_export_parse_error_is_code_2(tmp_path, capsys):
    bad = tmp_path / "bad.ipd"
    bad.write_text("not a protocol\n")
    code, _, err = run_cli(
        capsys, "export", str(bad), "--format", "dot"
    )
    assert code == 2
    assert "error:" in err
