"""Command-line entry point.

Subcommands: simulate (one episode), sweep (experiment grid), plan
(one-shot planning from a state+request document), serve (dispatch
service), emit-plots (long-format plot data from sweep output). Every run
prints a resolved-config header so results are reproducible from the log
alone. Exit codes: 0 success, 1 runtime failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import sys
from dataclasses import replace

from .casualty import CasualtyGenConfig, EvacRequest
from .harness import (
    DEFAULTS,
    ExperimentConfig,
    Policy,
    rows_to_csv,
    rows_to_json,
    rows_to_plot_csv,
    run_episode,
    run_sweep,
    SWEEPABLE,
)
from .mcts import SearchConfig, plan
from .reward import MINUTES_PER_HOUR
from .scenario import ScenarioError, load_bundled, load_scenario
from .smdp import ActionSpace, AircraftState, Platoon, SmdpState


class ConfigError(Exception):
    pass


def _parse_value(text: str):
    """Literal JSON if it parses, bare string otherwise."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _apply_overrides(config: dict, overrides: list[str]) -> dict:
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        node = config
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot override through non-object key {part!r}")
        node[parts[-1]] = _parse_value(value)
    return config


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        return json.loads(pathlib.Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None


def _resolve_scenario(name_or_path: str):
    p = pathlib.Path(name_or_path)
    if p.suffix == ".json" or p.exists():
        try:
            return load_scenario(p.read_text())
        except FileNotFoundError:
            raise ConfigError(f"scenario file not found: {name_or_path}") from None
    try:
        return load_bundled(name_or_path)
    except FileNotFoundError:
        raise ConfigError(f"unknown bundled scenario {name_or_path!r}") from None


def _search_config(doc: dict, seed: int) -> SearchConfig:
    base = SearchConfig(seed=seed)
    known = {k: doc[k] for k in (
        "thread_count", "thread_duration", "discount", "exploration_c", "iterations_per_tree"
    ) if k in doc}
    return replace(base, **known)


def _print_header(args, config: dict) -> None:
    header = {
        "subcommand": args.cmd,
        "seed": args.seed,
        "scenario": args.scenario,
        "out": args.out,
        "config": config,
    }
    print("# resolved config")
    print(json.dumps(header, indent=2, sort_keys=True))


def _write_out(args, text: str) -> None:
    if args.out:
        pathlib.Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)


def cmd_simulate(args, config: dict) -> int:
    scenario = _resolve_scenario(args.scenario)
    point = dict(DEFAULTS)
    point.update({k: config[k] for k in SWEEPABLE if k in config})
    policy = Policy(args.policy or config.get("policy", "optimal_a1"))
    search = _search_config(config.get("search", {}), args.seed)
    record = run_episode(
        scenario,
        point,
        policy,
        args.seed,
        search,
        float(config.get("episode_hours", 24.0)),
    )
    doc = {
        "point": point,
        "policy": policy.value,
        "seed": args.seed,
        "metrics": {
            "total_reward": record.total_reward,
            "response_mean_min": record.response_mean,
            "fsmp_response_mean_min": record.fsmp_response_mean,
            "asmp_response_mean_min": record.asmp_response_mean,
            "watercraft_ratio": record.watercraft_ratio,
            "response_disparity_min": record.response_disparity,
            "requests": record.requests,
            "transfers": record.transfers,
            "patients": record.patients,
        },
    }
    _write_out(args, json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_sweep(args, config: dict) -> int:
    scenario = _resolve_scenario(args.scenario)
    policies = tuple(Policy(p) for p in config.get(
        "policies", ["greedy", "optimal_a2", "optimal_a1"]
    ))
    cfg = ExperimentConfig(
        grid={k: list(v) for k, v in config.get("grid", {}).items()},
        policies=policies,
        replications=int(config.get("replications", 20)),
        episode_hours=float(config.get("episode_hours", 24.0)),
        master_seed=args.seed,
        search=_search_config(config.get("search", {}), args.seed),
    )
    done = [0]

    def tick(pi, policy, ri):
        done[0] += 1
        print(f"\rpoint {pi} {policy.value} rep {ri}", end="", file=sys.stderr, flush=True)

    rows = run_sweep(scenario, cfg, progress=tick)
    print(file=sys.stderr)
    csv_text = rows_to_csv(rows)
    _write_out(args, csv_text)
    if args.out:
        json_path = pathlib.Path(args.out).with_suffix(".json")
        json_path.write_text(rows_to_json(rows))
        print(f"wrote {json_path}")
    return 0


def cmd_plan(args, config: dict) -> int:
    if "request" not in config:
        raise ConfigError("plan needs a config with a 'request' object")
    scenario = _resolve_scenario(config.get("scenario", args.scenario))
    req = EvacRequest.from_json(config["request"])
    clock = float(config.get("clock", req.injury_time))
    state = SmdpState(
        clock=max(clock, req.injury_time),
        aircraft={
            Platoon.FSMP: AircraftState(
                Platoon.FSMP, busy_until=float(config.get("forward_free", 0.0))
            ),
            Platoon.ASMP: AircraftState(
                Platoon.ASMP, busy_until=float(config.get("rear_free", 0.0))
            ),
        },
        pending_request=req,
    )
    gen_doc = config.get("casualty", {})
    gen = CasualtyGenConfig(
        magnitude_multiplier=float(gen_doc.get("magnitude", 1.0)),
        platoon_ratio=float(gen_doc.get("platoon_ratio", 1.4)),
        transfer_proportion=float(gen_doc.get("transfer_proportion", 0.25)),
        patients_per_request=int(gen_doc.get("patients", 3)),
        seed=args.seed,
    )
    search = _search_config(config.get("search", {}), args.seed)
    space = ActionSpace(config.get("action_space", "A1"))
    result = plan(scenario, state, gen, replace(search, action_space=space))
    doc = result.to_json()
    doc.pop("trees", None)
    _write_out(args, json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_serve(args, config: dict) -> int:
    import uvicorn

    from .service import DispatchService, create_app

    scenario = _resolve_scenario(args.scenario)
    service = DispatchService(
        scenario,
        search=_search_config(config.get("search", {}), args.seed),
        log_path=config.get("event_log", args.out),
        clock_rate=float(config.get("clock_rate", 1.0)),
    )
    app = create_app(service)
    host = config.get("host", "127.0.0.1")
    port = int(config.get("port", 8000))
    print(f"serving on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def cmd_emit_plots(args, config: dict) -> int:
    source = config.get("input")
    if not source:
        raise ConfigError("emit-plots needs --set input=<sweep rows .json>")
    try:
        rows = json.loads(pathlib.Path(source).read_text())
    except FileNotFoundError:
        raise ConfigError(f"sweep rows file not found: {source}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"sweep rows file is not valid JSON: {exc}") from None
    axes = config.get("panels")
    if axes is None:
        axes = [k for k in SWEEPABLE if len({row[k] for row in rows}) > 1]
    if not axes:
        axes = ["platoon_ratio"]
    _write_out(args, rows_to_plot_csv(rows, list(axes)))
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "plan": cmd_plan,
    "serve": cmd_serve,
    "emit-plots": cmd_emit_plots,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medevacsim",
        description="Maritime medevac planning: simulate, sweep, plan, serve, emit-plots.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)
    for name, help_text in [
        ("simulate", "run one seeded episode and write its metrics"),
        ("sweep", "run an experiment grid and write aggregated CSV/JSON"),
        ("plan", "plan a single pending request from a state document"),
        ("serve", "start the live dispatch HTTP service"),
        ("emit-plots", "convert sweep rows into long-format plot data"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--seed", type=int, default=0, help="master random seed")
        p.add_argument("--out", help="output file path (stdout when omitted)")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config key (dotted path, JSON value); repeatable",
        )
        p.add_argument("--policy", help="policy name (greedy, optimal_a1, optimal_a2)")
        p.add_argument(
            "--scenario",
            default="default_scenario",
            help="bundled scenario name or path to a scenario JSON file",
        )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _apply_overrides(_load_config(args.config), args.overrides)
        _print_header(args, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.cmd](args, config)
    except (ConfigError, ScenarioError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
