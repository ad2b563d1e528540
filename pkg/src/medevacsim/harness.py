"""Seeded episodes, parameter sweeps, and aggregated metrics.

An episode drives the decision process over one 24 h request stream with a
fixed policy and records total reward, response times by platoon, and the
fraction of transfers routed via watercraft. Sweeps run a grid of casualty
and aircraft parameters with paired seeds across policies and report
Student-t 95% confidence intervals over replications.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import random
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy import stats

from .actions import ActionKind
from .casualty import CasualtyGenConfig, sample_thread
from .mcts import SearchConfig, greedy_policy, plan
from .reward import MINUTES_PER_HOUR
from .scenario import Scenario
from .smdp import ActionSpace, Platoon, flush_pois, initial_state, step


class Policy(Enum):
    GREEDY = "greedy"
    OPTIMAL_A1 = "optimal_a1"
    OPTIMAL_A2 = "optimal_a2"
    GREEDY_A2 = "greedy_a2"

    @property
    def action_space(self) -> ActionSpace:
        return ActionSpace.A2 if self in (Policy.OPTIMAL_A2, Policy.GREEDY_A2) else ActionSpace.A1

    @property
    def uses_search(self) -> bool:
        return self in (Policy.OPTIMAL_A1, Policy.OPTIMAL_A2)


# Default operating point when a parameter is not swept.
DEFAULTS = {
    "magnitude": 1.0,
    "platoon_ratio": 1.4,
    "transfer_proportion": 0.25,
    "airspeed": 150.0,
    "patients": 3,
}

SWEEPABLE = tuple(DEFAULTS)


@dataclass(frozen=True)
class ExperimentConfig:
    grid: dict[str, list] = field(default_factory=dict)
    policies: tuple[Policy, ...] = (Policy.GREEDY, Policy.OPTIMAL_A2, Policy.OPTIMAL_A1)
    replications: int = 20
    episode_hours: float = 24.0
    master_seed: int = 0
    search: SearchConfig = field(default_factory=SearchConfig)

    def __post_init__(self):
        for key in self.grid:
            if key not in SWEEPABLE:
                raise ValueError(f"unknown sweep parameter {key!r}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")

    def grid_points(self) -> list[dict]:
        """Cartesian product of the sweep axes over the defaults, in
        deterministic axis-then-value order."""
        axes = [(k, list(self.grid[k])) for k in SWEEPABLE if k in self.grid]
        points = []
        for combo in itertools.product(*[vals for _, vals in axes]):
            p = dict(DEFAULTS)
            p.update({k: v for (k, _), v in zip(axes, combo)})
            points.append(p)
        return points


@dataclass(frozen=True)
class MetricsRecord:
    total_reward: float
    response_mean: float | None  # minutes, all incidents pooled
    fsmp_response_mean: float | None  # minutes
    asmp_response_mean: float | None  # minutes
    watercraft_ratio: float | None
    response_disparity: float | None  # minutes
    requests: int
    transfers: int
    patients: int


def _scenario_at(scenario: Scenario, point: dict) -> Scenario:
    spec = replace(scenario.aircraft_spec, cruise_speed=float(point["airspeed"]))
    return replace(scenario, aircraft_spec=spec)


def _gen_config(point: dict, hours: float, seed: int) -> CasualtyGenConfig:
    return CasualtyGenConfig(
        magnitude_multiplier=float(point["magnitude"]),
        platoon_ratio=float(point["platoon_ratio"]),
        transfer_proportion=float(point["transfer_proportion"]),
        patients_per_request=int(point["patients"]),
        horizon=hours,
        seed=seed,
    )


def run_episode(
    scenario: Scenario,
    point: dict,
    policy: Policy,
    seed: int,
    search: SearchConfig = SearchConfig(),
    episode_hours: float = 24.0,
) -> MetricsRecord:
    """One seeded replication at a grid point."""
    world = _scenario_at(scenario, point)
    gen = _gen_config(point, episode_hours, seed)
    thread = sample_thread(world, gen)
    state, remaining = initial_state(thread)
    rng = random.Random((seed << 1) ^ 0x9E3779B9)
    space = policy.action_space

    total = 0.0
    responses: dict[Platoon, list[float]] = {Platoon.FSMP: [], Platoon.ASMP: []}
    transfers = 0
    via_watercraft = 0
    epoch = 0
    while state.pending_request is not None:
        if policy.uses_search:
            cfg = replace(search, action_space=space, seed=(search.seed << 20) + (seed << 6) + epoch)
            action = plan(world, state, gen, cfg).chosen
        else:
            action = greedy_policy(world, state, space=space)
        outcome = step(world, state, action, remaining, rng, search.smdp)
        total += outcome.reward
        transfers += 1
        if action.kind is ActionKind.WATERCRAFT:
            via_watercraft += 1
        tl = outcome.timeline
        responses[Platoon.FSMP].append(
            (tl.delivery_time - state.pending_request.injury_time) * MINUTES_PER_HOUR
        )
        for _, t_x, _, platoon in outcome.intermediate_log:
            responses[platoon].append(t_x)
        state = outcome.next_state
        remaining = outcome.remaining_thread
        epoch += 1
    logs, events = flush_pois(world, state, remaining, rng, search.smdp)
    total += sum(v for _, v in events)
    for _, t_x, _, platoon in logs:
        responses[platoon].append(t_x)

    fsmp = responses[Platoon.FSMP]
    asmp = responses[Platoon.ASMP]
    pooled = fsmp + asmp
    fsmp_mean = float(np.mean(fsmp)) if fsmp else None
    asmp_mean = float(np.mean(asmp)) if asmp else None
    disparity = abs(fsmp_mean - asmp_mean) if fsmp and asmp else None
    return MetricsRecord(
        total_reward=total,
        response_mean=float(np.mean(pooled)) if pooled else None,
        fsmp_response_mean=fsmp_mean,
        asmp_response_mean=asmp_mean,
        watercraft_ratio=(via_watercraft / transfers) if transfers else None,
        response_disparity=disparity,
        requests=len(thread),
        transfers=transfers,
        patients=sum(r.patients for r in thread),
    )


_METRICS = (
    "total_reward",
    "response_mean",
    "fsmp_response_mean",
    "asmp_response_mean",
    "watercraft_ratio",
    "response_disparity",
)


def _mean_ci(values: list[float]) -> tuple[float | None, float | None]:
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None
    mean = float(np.mean(vals))
    if len(vals) < 2:
        return mean, None
    sd = float(np.std(vals, ddof=1))
    half = float(stats.t.ppf(0.975, len(vals) - 1)) * sd / math.sqrt(len(vals))
    return mean, half


def replication_seeds(master_seed: int, points: int, replications: int) -> list[list[int]]:
    """Per-(grid point, replication) seeds, shared across policies so that
    policy comparisons are paired."""
    ss = np.random.SeedSequence(master_seed)
    children = ss.spawn(points)
    return [
        [int(c.generate_state(1)[0]) for c in child.spawn(replications)]
        for child in children
    ]


def run_sweep(scenario: Scenario, cfg: ExperimentConfig, progress=None) -> list[dict]:
    """Aggregated rows, one per (grid point, policy), in deterministic order.

    A failed replication aborts its grid point with a diagnostic error.
    """
    points = cfg.grid_points()
    seeds = replication_seeds(cfg.master_seed, len(points), cfg.replications)
    rows = []
    for pi, point in enumerate(points):
        for policy in cfg.policies:
            records = []
            for ri in range(cfg.replications):
                try:
                    records.append(
                        run_episode(
                            scenario,
                            point,
                            policy,
                            seeds[pi][ri],
                            cfg.search,
                            cfg.episode_hours,
                        )
                    )
                except Exception as exc:
                    raise RuntimeError(
                        f"replication {ri} failed at point {point} policy {policy.value}: {exc}"
                    ) from exc
                if progress is not None:
                    progress(pi, policy, ri)
            row = {k: point[k] for k in SWEEPABLE}
            row["policy"] = policy.value
            row["replications"] = cfg.replications
            for m in _METRICS:
                mean, half = _mean_ci([getattr(r, m) for r in records])
                row[f"{m}_mean"] = mean
                row[f"{m}_ci95"] = half
            row["mean_requests"] = float(np.mean([r.requests for r in records]))
            rows.append(row)
    return rows


CSV_COLUMNS = (
    list(SWEEPABLE)
    + ["policy", "replications", "mean_requests"]
    + [f"{m}_{s}" for m in _METRICS for s in ("mean", "ci95")]
)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def rows_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, indent=2) + "\n"


def rows_to_plot_csv(rows: list[dict], sweep_axes: list[str]) -> str:
    """Long-format plot data: one row per (axis, x, policy, metric)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["panel", "x", "policy", "metric", "value", "ci95"])
    for axis in sweep_axes:
        for row in rows:
            for m in _METRICS:
                if row.get(f"{m}_mean") is None:
                    continue
                writer.writerow(
                    [
                        axis,
                        _fmt(row[axis]),
                        row["policy"],
                        m,
                        _fmt(row[f"{m}_mean"]),
                        _fmt(row.get(f"{m}_ci95")),
                    ]
                )
    return buf.getvalue()
