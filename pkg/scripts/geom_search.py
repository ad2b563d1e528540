#!/usr/bin/env python3
"""Grid-search scenario geometry against the forced-policy phase criteria.

For each candidate geometry, compares always-direct vs always-watercraft
episode rewards at platoon ratios 0.6/1.0/1.4. Wanted: watercraft clearly
behind at low ratios and far ahead at 1.4. Dev tool only."""

import itertools
import math
import random
import sys

import numpy as np

from medevacsim.actions import ActionKind, action_catalog
from medevacsim.casualty import sample_thread
from medevacsim.harness import DEFAULTS, _gen_config
from medevacsim.kinematics import build_timeline, response_time
from medevacsim.scenario import load_scenario
from medevacsim.smdp import Platoon, flush_pois, initial_state, step


def shuttle(route_id, speed, a, b, until=42.0):
    leg = math.dist(a, b) / speed
    waypoints = [{"x": a[0], "y": a[1], "t": 0.0}]
    t, here, there = 0.0, a, b
    while t < until:
        t += leg
        waypoints.append({"x": there[0], "y": there[1], "t": t})
        here, there = there, here
    return {"id": route_id, "speed_kn": speed, "waypoints": waypoints}


def build(base_x, kr, ex, rr, hl=25.0, handoff=0.17, refuel=0.25):
    """base_x: Kauai base x; kr: Kauai POI radius; ex: exchange center x;
    rr: rear POI radius; hl: route half-length; handoff/refuel: hours."""
    s = kr / math.hypot(17.0, 26.0)
    facilities = [
        {"id": "kauai_r2_base", "role": 2, "island": "forward", "x": base_x, "y": 12.0},
        {"id": "kauai_r2_south", "role": 2, "island": "forward",
         "x": base_x - 17.0 * s, "y": 12.0 - 26.0 * s},
        {"id": "kauai_r1_north", "role": 1, "island": "forward",
         "x": base_x - 0.55 * kr, "y": 12.0 + 0.835 * kr},
        {"id": "kauai_r1_west", "role": 1, "island": "forward",
         "x": base_x - 0.958 * kr, "y": 12.0 - 0.287 * kr},
        {"id": "wheeler", "role": 2, "island": "rear", "x": 40.0, "y": 2.0},
        {"id": "oahu_r2_base", "role": 2, "island": "rear", "x": 50.0, "y": -2.0},
        {"id": "oahu_r1_north", "role": 1, "island": "rear",
         "x": 50.0 - 0.164 * rr, "y": -2.0 + 0.986 * rr},
        {"id": "oahu_r1_east", "role": 1, "island": "rear",
         "x": 50.0 + 0.984 * rr, "y": -2.0 + 0.179 * rr},
        {"id": "tripler", "role": 3, "island": "rear", "x": 60.0, "y": -8.0},
    ]
    watercraft = [
        shuttle("lsv", 10.0, (ex + 0.9 * hl, -12.0), (ex - 0.9 * hl, -12.0)),
        shuttle("lcu", 8.0, (ex - hl, -18.0), (ex + hl, -18.0)),
        shuttle("epf", 43.0, (ex + 1.1 * hl, -8.0), (ex - 1.1 * hl, -8.0)),
    ]
    return load_scenario(
        {
            "origin_lat_lon": [21.7, -158.9],
            "facilities": facilities,
            "bases": {"forward": "kauai_r2_base", "rear": "oahu_r2_base"},
            "land_axps": ["wheeler"],
            "watercraft": watercraft,
            "aircraft": {
                "cruise_speed_kn": 150.0,
                "cabin_capacity": 6,
                "handoff_duration_h": handoff,
                "refuel_duration_h": refuel,
                "pickup_duration_h": 0.0833,
                "max_leg_range_nm": 400.0,
            },
        }
    )


def run(sc, policy, r, seed):
    point = dict(DEFAULTS)
    point["platoon_ratio"] = r
    gen = _gen_config(point, 24.0, seed)
    full = sample_thread(sc, gen)
    state, remaining = initial_state(full)
    rng = random.Random(seed)
    total = 0.0
    while state.pending_request is not None:
        req = state.pending_request
        fwd = state.aircraft[Platoon.FSMP].busy_until
        rear = state.aircraft[Platoon.ASMP].busy_until
        cands = []
        for a in action_catalog(sc):
            if policy == "wc" and a.kind is not ActionKind.WATERCRAFT:
                continue
            if policy == "direct" and a.kind is not ActionKind.DIRECT:
                continue
            tl = build_timeline(sc, req, a, state.clock, fwd, rear)
            if tl:
                cands.append((response_time(tl), a))
        a = min(cands)[1] if cands else action_catalog(sc)[-1]
        out = step(sc, state, a, remaining, rng)
        total += out.reward
        state, remaining = out.next_state, out.remaining_thread
    _, ev = flush_pois(sc, state, remaining, rng)
    return total + sum(v for _, v in ev)


def evaluate(sc, seeds=8):
    nets = {}
    for r in (0.6, 1.0, 1.4):
        d = np.mean([run(sc, "direct", r, 3000 + s) for s in range(seeds)])
        w = np.mean([run(sc, "wc", r, 3000 + s) for s in range(seeds)])
        nets[r] = (w - d, d, w)
    return nets


def main():
    grid = list(
        itertools.product(
            [-125.0, -140.0, -155.0],      # base_x
            [10.0],                        # kauai radius
            [20.0, 35.0],                  # exchange center offset from base
            [4.0],                         # rear radius
            [8.0],                         # route half-length
            [(0.17, 0.25), (0.3, 0.15)],   # handoff/refuel hours
        )
    )
    for base_x, kr, dx, rr, hl, (ho, rf) in grid:
        ex = base_x + dx
        if ex - 1.1 * hl < base_x + 8.0:
            continue  # routes would run aground on the forward island
        sc = build(base_x, kr, ex, rr, hl, ho, rf)
        n = evaluate(sc)
        ratio = n[1.4][2] / n[1.4][1]
        print(
            f"bx={base_x:6.1f} ex={ex:6.1f} hl={hl:4.1f} ho={ho:.2f} rf={rf:.2f} | "
            f"net .6={n[0.6][0]:+6.2f} 1.0={n[1.0][0]:+6.2f} 1.4={n[1.4][0]:+6.2f} "
            f"| d1.4={n[1.4][1]:6.2f} w1.4={n[1.4][2]:6.2f} wc/d={ratio:.3f}",
            flush=True,
        )


if __name__ == "__main__":
    main()
