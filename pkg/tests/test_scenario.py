import json
import math

import pytest
from hypothesis import given, strategies as st

from medevacsim.scenario import (
    GeoPoint,
    Island,
    Role,
    ScenarioError,
    load_bundled,
    load_scenario,
    serialize_scenario,
    watercraft_position,
)


def minimal_doc():
    return {
        "origin_lat_lon": [21.7, -158.9],
        "facilities": [
            {"id": "fb", "role": 2, "island": "forward", "x": -60.0, "y": 0.0},
            {"id": "f1", "role": 1, "island": "forward", "x": -70.0, "y": 5.0},
            {"id": "rb", "role": 2, "island": "rear", "x": 50.0, "y": 0.0},
            {"id": "r3", "role": 3, "island": "rear", "x": 60.0, "y": -5.0},
        ],
        "bases": {"forward": "fb", "rear": "rb"},
        "land_axps": [],
        "watercraft": [
            {
                "id": "boat",
                "speed_kn": 10.0,
                "waypoints": [
                    {"x": 0.0, "y": 0.0, "t": 0.0},
                    {"x": 10.0, "y": 0.0, "t": 1.0},
                ],
            }
        ],
        "aircraft": {"cruise_speed_kn": 150.0, "cabin_capacity": 6},
    }


def test_load_minimal_document():
    sc = load_scenario(minimal_doc())
    assert sc.forward_base.id == "fb"
    assert sc.rear_base.island is Island.REAR
    assert sc.role3.role is Role.ROLE3
    assert sc.route("boat").speed == 10.0


def test_round_trip_bundled_scenarios():
    for name in ("default_scenario", "deployment_replay"):
        sc = load_bundled(name)
        doc = serialize_scenario(sc)
        again = load_scenario(json.dumps(doc))
        assert serialize_scenario(again) == doc


def test_duplicate_facility_id_rejected():
    doc = minimal_doc()
    doc["facilities"].append({"id": "fb", "role": 1, "island": "forward", "x": 0, "y": 0})
    with pytest.raises(ScenarioError, match="duplicate"):
        load_scenario(doc)


def test_missing_role3_rejected():
    doc = minimal_doc()
    doc["facilities"] = [f for f in doc["facilities"] if f["role"] != 3]
    with pytest.raises(ScenarioError, match="role-3"):
        load_scenario(doc)


def test_base_island_mismatch_rejected():
    doc = minimal_doc()
    doc["bases"]["forward"] = "rb"
    with pytest.raises(ScenarioError):
        load_scenario(doc)


def test_waypoint_speed_consistency_enforced():
    doc = minimal_doc()
    doc["watercraft"][0]["waypoints"][1]["t"] = 0.5  # implies 20 kn on a 10 kn route
    with pytest.raises(ScenarioError, match="speed"):
        load_scenario(doc)


def test_waypoint_times_must_increase():
    doc = minimal_doc()
    doc["watercraft"][0]["waypoints"][1]["t"] = 0.0
    with pytest.raises(ScenarioError, match="increasing"):
        load_scenario(doc)


def test_out_of_bounds_coordinate_rejected():
    doc = minimal_doc()
    doc["facilities"][0]["x"] = 5000.0
    with pytest.raises(ScenarioError, match="bound"):
        load_scenario(doc)


def test_invalid_json_rejected():
    with pytest.raises(ScenarioError, match="JSON"):
        load_scenario("{not json")


def test_unknown_facility_lookup():
    sc = load_scenario(minimal_doc())
    with pytest.raises(ScenarioError, match="unknown facility"):
        sc.facility("ghost")


def test_watercraft_position_interpolation():
    sc = load_scenario(minimal_doc())
    route = sc.route("boat")
    pos, vel = watercraft_position(route, 0.5)
    assert pos.x == pytest.approx(5.0)
    assert vel.x == pytest.approx(10.0)
    # holds endpoints outside the schedule with zero velocity
    before, v0 = watercraft_position(route, -1.0)
    after, v1 = watercraft_position(route, 99.0)
    assert (before.x, after.x) == (0.0, 10.0)
    assert v0.x == v1.x == 0.0


@given(st.floats(min_value=0.0, max_value=1.0))
def test_watercraft_position_stays_on_segment(t):
    sc = load_scenario(minimal_doc())
    pos, _ = watercraft_position(sc.route("boat"), t)
    assert -1e-9 <= pos.x <= 10.0 + 1e-9
    assert pos.y == pytest.approx(0.0)


@given(
    st.floats(min_value=-500, max_value=500),
    st.floats(min_value=-500, max_value=500),
    st.floats(min_value=-500, max_value=500),
    st.floats(min_value=-500, max_value=500),
)
def test_distance_matches_euclid(x1, y1, x2, y2):
    a, b = GeoPoint(x1, y1), GeoPoint(x2, y2)
    assert a.distance_to(b) == pytest.approx(math.hypot(x2 - x1, y2 - y1))
    assert a.distance_to(b) == pytest.approx(b.distance_to(a))
