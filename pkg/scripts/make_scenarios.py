#!/usr/bin/env python3
"""Regenerate the bundled scenario data files.

Waypoint times are derived from segment lengths at the stated speed so the
strict segment-speed validation holds exactly. Run from the repo root:

    python scripts/make_scenarios.py
"""

import json
import math
import pathlib

DATA = pathlib.Path(__file__).resolve().parent.parent / "src" / "medevacsim" / "data"


def shuttle(route_id, speed, a, b, until=42.0):
    """Back-and-forth route between points a and b, waypoint times exact."""
    leg = math.dist(a, b) / speed
    waypoints = [{"x": a[0], "y": a[1], "t": 0.0}]
    t, here, there = 0.0, a, b
    while t < until:
        t += leg
        waypoints.append({"x": there[0], "y": there[1], "t": t})
        here, there = there, here
    return {"id": route_id, "speed_kn": speed, "waypoints": waypoints}


def default_scenario():
    # Kauai casualty sites sit on a 10 nm ring around the forward base,
    # Oahu's on an 8 nm ring. Both rings carry load signal: the islands
    # split a fixed arrival rate, so a forward-heavy day is rear-light and
    # favors the watercraft exchange twice over (forward congestion up,
    # rear-aircraft occupancy cost down), and vice versa.
    base_x, kr, rr = -110.0, 10.0, 8.0
    s = kr / math.hypot(17.0, 26.0)
    facilities = [
        # Kauai (forward island)
        {"id": "kauai_r2_base", "role": 2, "island": "forward", "x": base_x, "y": 12.0},
        {"id": "kauai_r2_south", "role": 2, "island": "forward",
         "x": base_x - 17.0 * s, "y": 12.0 - 26.0 * s},
        {"id": "kauai_r1_north", "role": 1, "island": "forward",
         "x": base_x - 0.55 * kr, "y": 12.0 + 0.835 * kr},
        {"id": "kauai_r1_west", "role": 1, "island": "forward",
         "x": base_x - 0.958 * kr, "y": 12.0 - 0.287 * kr},
        # Oahu (rear island)
        {"id": "wheeler", "role": 2, "island": "rear", "x": 40.0, "y": 2.0},
        {"id": "oahu_r2_base", "role": 2, "island": "rear", "x": 50.0, "y": -2.0},
        {"id": "oahu_r1_north", "role": 1, "island": "rear",
         "x": 50.0 - 0.164 * rr, "y": -2.0 + 0.986 * rr},
        {"id": "oahu_r1_east", "role": 1, "island": "rear",
         "x": 50.0 + 0.984 * rr, "y": -2.0 + 0.179 * rr},
        {"id": "tripler", "role": 3, "island": "rear", "x": 60.0, "y": -8.0},
    ]
    # three shuttles spread along the channel so the planner can pick the
    # minimum-response exchange for each mission
    lsv_x, lcu_x, epf_x, hl = -65.0, -40.0, -10.0, 8.0
    watercraft = [
        shuttle("lsv", 10.0, (lsv_x + 0.9 * hl, -12.0), (lsv_x - 0.9 * hl, -12.0)),
        shuttle("lcu", 8.0, (lcu_x - hl, -18.0), (lcu_x + hl, -18.0)),
        shuttle("epf", 43.0, (epf_x + 1.1 * hl, -8.0), (epf_x - 1.1 * hl, -8.0)),
    ]
    return {
        "origin_lat_lon": [21.7, -158.9],
        "facilities": facilities,
        "bases": {"forward": "kauai_r2_base", "rear": "oahu_r2_base"},
        "land_axps": ["wheeler"],
        "watercraft": watercraft,
        "aircraft": {
            "cruise_speed_kn": 150.0,
            "cabin_capacity": 6,
            "handoff_duration_h": 0.17,
            "refuel_duration_h": 0.26,
            "pickup_duration_h": 0.0833,
            "max_leg_range_nm": 400.0,
        },
    }


def deployment_replay():
    """Single-island exercise replay: both aircraft from the same airfield,
    one watercraft south of the coast moving south-westerly at 5 kn. The
    leg-range cap confines the exercise to the watercraft exchange."""
    step = 60.0 / math.sqrt(2.0)  # 12 h of 5 kn south-westerly drift
    return {
        "origin_lat_lon": [21.35, -157.97],
        "facilities": [
            {"id": "wheeler_fsmp", "role": 2, "island": "forward", "x": 46.0, "y": 2.0},
            {"id": "ground_force", "role": 1, "island": "forward", "x": 49.0, "y": 2.0},
            {"id": "oahu_south_r2", "role": 2, "island": "rear", "x": 56.0, "y": -10.0},
            {"id": "tripler", "role": 3, "island": "rear", "x": 62.0, "y": -20.0},
        ],
        "bases": {"forward": "wheeler_fsmp", "rear": "oahu_south_r2"},
        "land_axps": [],
        "watercraft": [
            {
                "id": "lsv3",
                "speed_kn": 5.0,
                "waypoints": [
                    {"x": 52.0, "y": -18.0, "t": 0.0},
                    {"x": 52.0 - step, "y": -18.0 - step, "t": 12.0},
                ],
            }
        ],
        "aircraft": {
            "cruise_speed_kn": 120.0,
            "cabin_capacity": 6,
            "handoff_duration_h": 0.25,
            "refuel_duration_h": 0.25,
            "pickup_duration_h": 0.17,
            "max_leg_range_nm": 25.0,
        },
    }


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    for name, doc in [
        ("default_scenario", default_scenario()),
        ("deployment_replay", deployment_replay()),
    ]:
        path = DATA / f"{name}.json"
        path.write_text(json.dumps(doc, indent=2) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
