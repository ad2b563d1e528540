"""Static world model: islands, facilities, bases, watercraft routes.

Coordinates are planar nautical miles east/north of a scenario origin
(declared as a lat/lon pair in the document for provenance only). A
scenario is immutable after loading and safe to share between concurrent
searches.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

from . import kernels

SCALE_BOUND_NM = 1000.0
SPEED_RTOL = 1e-6


class ScenarioError(ValueError):
    """Raised when a scenario document is malformed or breaks an invariant."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class Role(Enum):
    ROLE1 = 1
    ROLE2 = 2
    ROLE3 = 3


class Island(Enum):
    FORWARD = "forward"
    REAR = "rear"


@dataclass(frozen=True)
class GeoPoint:
    x: float  # nm east of scenario origin
    y: float  # nm north of scenario origin

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ScenarioError("coordinates must be finite")
        if abs(self.x) > SCALE_BOUND_NM or abs(self.y) > SCALE_BOUND_NM:
            raise ScenarioError(f"coordinate outside ±{SCALE_BOUND_NM} nm scenario bound")

    def distance_to(self, other: "GeoPoint") -> float:
        return kernels.distance(self.x, self.y, other.x, other.y)


@dataclass(frozen=True)
class Facility:
    id: str
    role: Role
    island: Island
    location: GeoPoint


@dataclass(frozen=True)
class WatercraftRoute:
    id: str
    speed: float  # knots, constant between waypoints
    waypoints: tuple[tuple[GeoPoint, float], ...]  # (point, arrival offset hours)

    def __post_init__(self):
        if self.speed <= 0:
            raise ScenarioError("speed must be positive", f"watercraft[{self.id}]")
        if len(self.waypoints) < 2:
            raise ScenarioError("route needs at least two waypoints", f"watercraft[{self.id}]")
        prev_p, prev_t = self.waypoints[0]
        for i, (p, t) in enumerate(self.waypoints[1:], start=1):
            if t <= prev_t:
                raise ScenarioError(
                    "waypoint times must be strictly increasing",
                    f"watercraft[{self.id}].waypoints[{i}]",
                )
            seg_speed = prev_p.distance_to(p) / (t - prev_t)
            if abs(seg_speed - self.speed) > SPEED_RTOL * self.speed:
                raise ScenarioError(
                    f"segment speed {seg_speed:.6f} kn disagrees with stated {self.speed} kn",
                    f"watercraft[{self.id}].waypoints[{i}]",
                )
            prev_p, prev_t = p, t


@dataclass(frozen=True)
class AircraftSpec:
    cruise_speed: float  # knots
    cabin_capacity: int  # patients
    handoff_duration: float = 0.17  # hours, hoist or ground patient exchange
    refuel_duration: float = 0.25  # hours
    pickup_duration: float = 0.0833  # hours
    max_leg_range: float = 400.0  # nm, single-leg feasibility cap

    def __post_init__(self):
        if self.cruise_speed <= 0:
            raise ScenarioError("cruise_speed must be positive", "aircraft")
        if self.cabin_capacity < 1:
            raise ScenarioError("cabin_capacity must be >= 1", "aircraft")
        for name in ("handoff_duration", "refuel_duration", "pickup_duration"):
            if getattr(self, name) < 0:
                raise ScenarioError(f"{name} must be non-negative", "aircraft")


@dataclass(frozen=True)
class Scenario:
    origin_lat_lon: tuple[float, float]
    facilities: tuple[Facility, ...]
    forward_base: Facility
    rear_base: Facility
    watercraft: tuple[WatercraftRoute, ...]
    land_axps: tuple[Facility, ...]
    role3: Facility
    aircraft_spec: AircraftSpec
    _by_id: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        by_id = {}
        for f in self.facilities:
            if f.id in by_id:
                raise ScenarioError(f"duplicate facility id {f.id!r}", "facilities")
            by_id[f.id] = f
        object.__setattr__(self, "_by_id", by_id)
        role3s = [f for f in self.facilities if f.role is Role.ROLE3]
        if len(role3s) != 1 or role3s[0] is not self.role3:
            raise ScenarioError("scenario must contain exactly one role-3 destination")
        if self.forward_base.island is not Island.FORWARD:
            raise ScenarioError("forward base must sit on the forward island", "bases.forward")
        if self.rear_base.island is not Island.REAR:
            raise ScenarioError("rear base must sit on the rear island", "bases.rear")
        route_ids = [r.id for r in self.watercraft]
        if len(set(route_ids)) != len(route_ids):
            raise ScenarioError("duplicate watercraft route id", "watercraft")

    def facility(self, facility_id: str) -> Facility:
        try:
            return self._by_id[facility_id]
        except KeyError:
            raise ScenarioError(f"unknown facility id {facility_id!r}") from None

    def route(self, route_id: str) -> WatercraftRoute:
        for r in self.watercraft:
            if r.id == route_id:
                return r
        raise ScenarioError(f"unknown watercraft route id {route_id!r}")

    def origin_facilities(self, island: Island | None = None) -> list[Facility]:
        """Role-1/role-2 facilities where evacuation requests originate."""
        out = [f for f in self.facilities if f.role in (Role.ROLE1, Role.ROLE2)]
        if island is not None:
            out = [f for f in out if f.island is island]
        return out

    def transfer_origins(self) -> list[Facility]:
        """Forward-island role-2 facilities eligible for interisland transfers."""
        return [
            f
            for f in self.facilities
            if f.role is Role.ROLE2 and f.island is Island.FORWARD
        ]


def watercraft_position(route: WatercraftRoute, t: float):
    """Position and velocity (nm/h vector) of a route at absolute time t.

    Linear interpolation along the active segment; before the first waypoint
    the craft holds the start, beyond the last it holds the end with zero
    velocity.
    """
    wps = route.waypoints
    first_p, first_t = wps[0]
    if t <= first_t:
        return first_p, GeoPoint(0.0, 0.0)
    last_p, last_t = wps[-1]
    if t >= last_t:
        return last_p, GeoPoint(0.0, 0.0)
    for i in range(1, len(wps)):
        p1, t1 = wps[i]
        if t <= t1:
            p0, t0 = wps[i - 1]
            frac = (t - t0) / (t1 - t0)
            vx = (p1.x - p0.x) / (t1 - t0)
            vy = (p1.y - p0.y) / (t1 - t0)
            return (
                GeoPoint(p0.x + (p1.x - p0.x) * frac, p0.y + (p1.y - p0.y) * frac),
                GeoPoint(vx, vy),
            )
    return last_p, GeoPoint(0.0, 0.0)  # unreachable, loop covers (first_t, last_t)


def _parse_point(obj, path):
    try:
        return GeoPoint(float(obj["x"]), float(obj["y"]))
    except KeyError as exc:
        raise ScenarioError(f"missing coordinate key {exc}", path) from None
    except (TypeError, ValueError) as exc:
        raise ScenarioError(str(exc), path) from None


def load_scenario(document) -> Scenario:
    """Validate a parsed scenario document (dict) or JSON string."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise ScenarioError("scenario document must be a JSON object")

    def need(key):
        if key not in document:
            raise ScenarioError("missing required key", key)
        return document[key]

    origin = need("origin_lat_lon")
    if not (isinstance(origin, (list, tuple)) and len(origin) == 2):
        raise ScenarioError("expected [lat, lon]", "origin_lat_lon")

    facilities = []
    for i, fd in enumerate(need("facilities")):
        path = f"facilities[{i}]"
        try:
            fac = Facility(
                id=str(fd["id"]),
                role=Role(int(fd["role"])),
                island=Island(fd["island"]),
                location=_parse_point(fd, path),
            )
        except KeyError as exc:
            raise ScenarioError(f"missing key {exc}", path) from None
        except ValueError as exc:
            raise ScenarioError(str(exc), path) from None
        facilities.append(fac)

    routes = []
    for i, rd in enumerate(need("watercraft")):
        path = f"watercraft[{i}]"
        try:
            wps = tuple(
                (_parse_point(w, f"{path}.waypoints[{j}]"), float(w["t"]))
                for j, w in enumerate(rd["waypoints"])
            )
            routes.append(WatercraftRoute(id=str(rd["id"]), speed=float(rd["speed_kn"]), waypoints=wps))
        except KeyError as exc:
            raise ScenarioError(f"missing key {exc}", path) from None

    ad = need("aircraft")
    try:
        spec = AircraftSpec(
            cruise_speed=float(ad["cruise_speed_kn"]),
            cabin_capacity=int(ad["cabin_capacity"]),
            handoff_duration=float(ad.get("handoff_duration_h", 0.17)),
            refuel_duration=float(ad.get("refuel_duration_h", 0.25)),
            pickup_duration=float(ad.get("pickup_duration_h", 0.0833)),
            max_leg_range=float(ad.get("max_leg_range_nm", 400.0)),
        )
    except KeyError as exc:
        raise ScenarioError(f"missing key {exc}", "aircraft") from None

    by_id = {}
    for f in facilities:
        if f.id in by_id:
            raise ScenarioError(f"duplicate facility id {f.id!r}", "facilities")
        by_id[f.id] = f

    def ref(facility_id, path):
        if facility_id not in by_id:
            raise ScenarioError(f"unknown facility id {facility_id!r}", path)
        return by_id[facility_id]

    bases = need("bases")
    role3s = [f for f in facilities if f.role is Role.ROLE3]
    if len(role3s) != 1:
        raise ScenarioError(f"expected exactly one role-3 facility, found {len(role3s)}", "facilities")

    return Scenario(
        origin_lat_lon=(float(origin[0]), float(origin[1])),
        facilities=tuple(facilities),
        forward_base=ref(bases.get("forward"), "bases.forward"),
        rear_base=ref(bases.get("rear"), "bases.rear"),
        watercraft=tuple(routes),
        land_axps=tuple(ref(a, f"land_axps[{i}]") for i, a in enumerate(need("land_axps"))),
        role3=role3s[0],
        aircraft_spec=spec,
    )


def serialize_scenario(scenario: Scenario) -> dict:
    """Inverse of load_scenario (round-trips on validated scenarios)."""
    return {
        "origin_lat_lon": list(scenario.origin_lat_lon),
        "facilities": [
            {
                "id": f.id,
                "role": f.role.value,
                "island": f.island.value,
                "x": f.location.x,
                "y": f.location.y,
            }
            for f in scenario.facilities
        ],
        "bases": {"forward": scenario.forward_base.id, "rear": scenario.rear_base.id},
        "land_axps": [f.id for f in scenario.land_axps],
        "watercraft": [
            {
                "id": r.id,
                "speed_kn": r.speed,
                "waypoints": [{"x": p.x, "y": p.y, "t": t} for p, t in r.waypoints],
            }
            for r in scenario.watercraft
        ],
        "aircraft": {
            "cruise_speed_kn": scenario.aircraft_spec.cruise_speed,
            "cabin_capacity": scenario.aircraft_spec.cabin_capacity,
            "handoff_duration_h": scenario.aircraft_spec.handoff_duration,
            "refuel_duration_h": scenario.aircraft_spec.refuel_duration,
            "pickup_duration_h": scenario.aircraft_spec.pickup_duration,
            "max_leg_range_nm": scenario.aircraft_spec.max_leg_range,
        },
    }


def load_bundled(name: str = "default_scenario") -> Scenario:
    """Load a scenario shipped with the package (data/<name>.json)."""
    text = resources.files("medevacsim.data").joinpath(f"{name}.json").read_text()
    return load_scenario(text)
