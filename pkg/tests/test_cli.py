import json

import pytest

from medevacsim.cli import build_parser, main


PLAN_FIXTURE = {
    "scenario": "deployment_replay",
    "request": {
        "id": "demo",
        "injury_time": 0.5,
        "origin": "wheeler_fsmp",
        "patients": 2,
        "kind": "interisland_transfer",
        "destination": "tripler",
    },
    "clock": 0.5,
    "search": {"thread_count": 2, "iterations_per_tree": 200},
}

FAST_SEARCH = [
    "--set", "search.thread_count=2",
    "--set", "search.iterations_per_tree=60",
]


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def body_after_header(out: str) -> str:
    # resolved-config header is a comment line plus one pretty JSON object
    assert out.startswith("# resolved config\n")
    rest = out[len("# resolved config\n"):]
    depth = 0
    for i, ch in enumerate(rest):
        depth += {"{": 1, "}": -1}.get(ch, 0)
        if ch == "}" and depth == 0:
            return rest[i + 1:].lstrip("\n")
    raise AssertionError("header object never closed")


def test_help_lists_every_flag(capsys):
    parser = build_parser()
    for sub in ("simulate", "sweep", "plan", "serve", "emit-plots"):
        with pytest.raises(SystemExit) as exc:
            parser.parse_args([sub, "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        for flag in ("--config", "--seed", "--out", "--set", "--policy", "--scenario"):
            assert flag in text, f"{sub} help is missing {flag}"


def test_simulate_greedy_runs(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--policy", "greedy", "--seed", "3", *FAST_SEARCH
    )
    assert code == 0
    doc = json.loads(body_after_header(out))
    assert doc["policy"] == "greedy"
    assert doc["metrics"]["requests"] > 0


def test_simulate_zero_magnitude_empty_metrics(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--policy", "greedy", "--set", "magnitude=0.0", *FAST_SEARCH
    )
    assert code == 0
    doc = json.loads(body_after_header(out))
    assert doc["metrics"]["requests"] == 0
    assert doc["metrics"]["total_reward"] == 0.0
    assert doc["metrics"]["fsmp_response_mean_min"] is None


def test_sweep_byte_identical_across_runs(tmp_path, capsys):
    args = [
        "sweep", "--seed", "5",
        "--set", 'policies=["greedy"]',
        "--set", "replications=2",
        "--set", 'grid={"platoon_ratio": [1.0, 1.4]}',
        *FAST_SEARCH,
    ]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    assert a.with_suffix(".json").exists()


def test_plan_prints_schedule(tmp_path, capsys):
    fixture = tmp_path / "plan.json"
    fixture.write_text(json.dumps(PLAN_FIXTURE))
    code, out, _ = run_cli(capsys, "plan", "--config", str(fixture), "--seed", "2")
    assert code == 0
    doc = json.loads(body_after_header(out))
    assert doc["chosen"].startswith("watercraft")
    assert doc["forward_dispatch"] >= 0.5
    assert doc["rear_dispatch"] is not None
    assert doc["predicted_response_minutes"] > 0
    assert "trees" not in doc


def test_emit_plots_from_sweep_rows(tmp_path, capsys):
    out_csv = tmp_path / "sweep.csv"
    assert main([
        "sweep", "--out", str(out_csv),
        "--set", 'policies=["greedy"]',
        "--set", "replications=2",
        "--set", 'grid={"airspeed": [150.0, 280.0]}',
        *FAST_SEARCH,
    ]) == 0
    capsys.readouterr()
    code, out, _ = run_cli(
        capsys, "emit-plots", "--set", f"input={out_csv.with_suffix('.json')}"
    )
    assert code == 0
    body = body_after_header(out)
    assert body.splitlines()[0] == "panel,x,policy,metric,value,ci95"
    assert any(line.startswith("airspeed,") for line in body.splitlines()[1:])


def test_config_error_exit_code(tmp_path, capsys):
    code, _, err = run_cli(capsys, "simulate", "--config", str(tmp_path / "missing.json"))
    assert code == 2
    assert "config error" in err

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_cli(capsys, "simulate", "--config", str(bad))
    assert code == 2

    code, _, err = run_cli(capsys, "simulate", "--scenario", "no_such_scenario")
    assert code == 2

    code, _, err = run_cli(capsys, "plan")
    assert code == 2
    assert "request" in err

    code, _, err = run_cli(capsys, "simulate", "--set", "oops")
    assert code == 2


def test_resolved_config_header_reflects_overrides(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--policy", "greedy", "--seed", "8",
        "--set", "magnitude=0.0", *FAST_SEARCH,
    )
    assert code == 0
    header = json.loads(out[len("# resolved config\n"):].split("\n}\n")[0] + "\n}")
    assert header["subcommand"] == "simulate"
    assert header["seed"] == 8
    assert header["config"]["magnitude"] == 0.0
    assert header["config"]["search"]["thread_count"] == 2
