"""Live dispatch service: request intake, planning, delay injection.

The service keeps a simulation clock (stepped by default, optionally tied
to wall time at a configurable rate), serializes planner invocations
against the live availability picture, and records every state change in
an append-only JSON-lines event log. Replaying that log rebuilds the same
mission records without re-running the planner.

HTTP layer (create_app) is a thin translation to JSON over the core
DispatchService class; all domain logic lives here so tests can drive the
service directly.
"""

from __future__ import annotations

import json
import queue
import threading
import time
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from enum import Enum

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse

from .actions import DIRECT
from .casualty import CasualtyGenConfig, EvacRequest, RequestKind
from .kinematics import build_timeline, dispatch_schedule, employment_times, response_time
from .mcts import PlanResult, SearchConfig, plan
from .reward import MINUTES_PER_HOUR
from .scenario import Island, Role, Scenario, watercraft_position
from .smdp import AircraftState, InfeasibleActionError, Platoon, SmdpState


class ServiceError(Exception):
    """API-shaped error: (code, message, optional field, http status)."""

    def __init__(self, code: str, message: str, fieldname: str | None = None, status: int = 400):
        self.code = code
        self.field = fieldname
        self.status = status
        super().__init__(message)

    def to_json(self) -> dict:
        body = {"code": self.code, "message": str(self)}
        if self.field is not None:
            body["field"] = self.field
        return body


class MissionStatus(Enum):
    PLANNED = "planned"
    FORWARD_ENROUTE = "forward_enroute"
    HANDOFF = "handoff"
    REAR_ENROUTE = "rear_enroute"
    DELIVERED = "delivered"
    ABORTED = "aborted"


@dataclass
class MissionRecord:
    request: EvacRequest
    plan: PlanResult
    # absolute sim hours; delays shift the forward-leg chain together
    forward_dispatch: float
    rear_dispatch: float | None
    handoff_time: float | None
    delivery_time: float
    planned_rear_dispatch: float | None
    predicted_handoff_gap: float  # hours
    injected_delays: list[tuple[str, float]] = field(default_factory=list)  # (cause, minutes)
    actual_events: list[dict] = field(default_factory=list)
    aborted: bool = False
    seq: int = 0  # per-mission event counter
    forward_busy_until: float = 0.0
    rear_busy_until: float = 0.0
    exchange_x: float | None = None
    exchange_y: float | None = None

    def delay_total_minutes(self) -> float:
        return sum(m for _, m in self.injected_delays)

    def status_at(self, now: float) -> MissionStatus:
        if self.aborted:
            return MissionStatus.ABORTED
        if now < self.forward_dispatch:
            return MissionStatus.PLANNED
        if now >= self.delivery_time:
            return MissionStatus.DELIVERED
        if self.handoff_time is None:  # direct flight, no exchange
            return MissionStatus.FORWARD_ENROUTE
        if now < self.handoff_time:
            return MissionStatus.FORWARD_ENROUTE
        # handoff completes when the rear aircraft is on station and the
        # patient exchange finishes; until then the mission sits at handoff
        rear_arrive = self.rear_dispatch if self.rear_dispatch is not None else self.handoff_time
        if now <= max(self.handoff_time, rear_arrive):
            return MissionStatus.HANDOFF
        return MissionStatus.REAR_ENROUTE

    def past_handoff(self, now: float) -> bool:
        if self.handoff_time is None:
            return now >= self.delivery_time
        return now > self.handoff_time


class SimClock:
    """Simulation clock in hours. rate = 0 gives a stepped clock advanced
    explicitly; rate = 1 maps 1:1 to wall time; other rates scale."""

    def __init__(self, rate: float = 0.0, start: float = 0.0):
        if rate < 0:
            raise ValueError("clock rate must be non-negative")
        self.rate = rate
        self._sim = start
        self._wall = time.monotonic()

    def now(self) -> float:
        if self.rate == 0.0:
            return self._sim
        return self._sim + (time.monotonic() - self._wall) * self.rate / 3600.0

    def advance_to(self, t: float) -> None:
        if t < self.now():
            raise ValueError("clock cannot move backwards")
        self._sim = t
        self._wall = time.monotonic()


class DispatchService:
    def __init__(
        self,
        scenario: Scenario,
        gen: CasualtyGenConfig | None = None,
        search: SearchConfig | None = None,
        log_path=None,
        clock_rate: float = 0.0,
        epoch: datetime | None = None,
    ):
        self.scenario = scenario
        self.gen = gen if gen is not None else CasualtyGenConfig()
        self.search = search if search is not None else SearchConfig()
        self.clock = SimClock(clock_rate)
        self.epoch = epoch if epoch is not None else datetime.now(timezone.utc).replace(microsecond=0)
        self.missions: dict[str, MissionRecord] = {}
        self.events: list[dict] = []
        self._seq = 0
        self._lock = threading.Lock()
        self._subscribers: list[queue.SimpleQueue] = []
        self._log_path = log_path
        self._log_file = open(log_path, "a", encoding="utf-8") if log_path else None
        if not self.events:
            self._emit(None, "service.started", {
                "epoch": self.epoch.isoformat(),
                "clock_rate": clock_rate,
            })

    # ---- time helpers -------------------------------------------------
    def iso(self, t: float | None) -> str | None:
        if t is None:
            return None
        return (self.epoch + timedelta(hours=t)).isoformat()

    def from_iso(self, text: str) -> float:
        dt = datetime.fromisoformat(text)
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return (dt - self.epoch).total_seconds() / 3600.0

    # ---- events -------------------------------------------------------
    def _emit(self, mission: MissionRecord | None, kind: str, payload: dict) -> dict:
        self._seq += 1
        event = {
            "seq": self._seq,
            "type": kind,
            "sim_time_h": self.clock.now(),
            "timestamp": self.iso(self.clock.now()),
        }
        if mission is not None:
            mission.seq += 1
            event["mission_id"] = mission.request.id
            event["mission_seq"] = mission.seq
            mission.actual_events.append({"seq": mission.seq, "type": kind, "timestamp": event["timestamp"]})
        event["payload"] = payload
        self.events.append(event)
        if self._log_file is not None:
            self._log_file.write(json.dumps(event) + "\n")
            self._log_file.flush()
        for q in list(self._subscribers):
            q.put(event)
        return event

    def subscribe(self) -> queue.SimpleQueue:
        q: queue.SimpleQueue = queue.SimpleQueue()
        self._subscribers.append(q)
        return q

    def unsubscribe(self, q) -> None:
        if q in self._subscribers:
            self._subscribers.remove(q)

    # ---- request intake ----------------------------------------------
    def _parse_request(self, payload: dict, now: float) -> EvacRequest:
        if not isinstance(payload, dict):
            raise ServiceError("invalid_payload", "request body must be a JSON object")
        rid = payload.get("id")
        if rid is None:
            rid = f"live-{uuid.uuid4().hex[:8]}"
        rid = str(rid)
        if rid in self.missions:
            raise ServiceError("duplicate_id", f"request id {rid!r} already has a mission", "id", 409)
        origin_id = payload.get("origin")
        if not origin_id:
            raise ServiceError("missing_field", "origin facility id is required", "origin")
        try:
            origin = self.scenario.facility(str(origin_id))
        except Exception:
            raise ServiceError("unknown_facility", f"unknown origin facility {origin_id!r}", "origin", 404) from None
        try:
            patients = int(payload.get("patients", 0))
        except (TypeError, ValueError):
            raise ServiceError("invalid_field", "patients must be an integer", "patients") from None
        capacity = self.scenario.aircraft_spec.cabin_capacity
        if not 1 <= patients <= capacity:
            raise ServiceError("invalid_field", f"patients must lie in [1, {capacity}]", "patients")
        kind_name = payload.get("kind", "interisland_transfer")
        try:
            kind = RequestKind(kind_name)
        except ValueError:
            raise ServiceError("invalid_field", f"unknown request kind {kind_name!r}", "kind") from None
        if kind is RequestKind.INTERISLAND_TRANSFER:
            if origin.role is not Role.ROLE2 or origin.island is not Island.FORWARD:
                raise ServiceError(
                    "invalid_field", "transfers must originate at a forward-island role-2 facility", "origin"
                )
            destination = self.scenario.role3.id
        else:
            base = self.scenario.forward_base if origin.island is Island.FORWARD else self.scenario.rear_base
            destination = base.id
        injury_time = now
        if "injury_time" in payload and payload["injury_time"] is not None:
            try:
                injury_time = self.from_iso(str(payload["injury_time"]))
            except ValueError:
                raise ServiceError("invalid_field", "injury_time must be ISO-8601", "injury_time") from None
        return EvacRequest(
            id=rid,
            injury_time=injury_time,
            origin=origin.id,
            patients=patients,
            kind=kind,
            destination=destination,
        )

    def submit_request(self, payload: dict) -> MissionRecord:
        """Plan the request against current availability and persist it."""
        with self._lock:
            now = self.clock.now()
            req = self._parse_request(payload, now)
            fwd_free = max([now] + [m.forward_busy_until for m in self.missions.values() if not m.aborted])
            rear_free = max(
                [now] + [m.rear_busy_until for m in self.missions.values() if not m.aborted]
            )
            root = SmdpState(
                clock=max(now, req.injury_time),
                aircraft={
                    Platoon.FSMP: AircraftState(Platoon.FSMP, busy_until=fwd_free),
                    Platoon.ASMP: AircraftState(Platoon.ASMP, busy_until=rear_free),
                },
                pending_request=req,
            )
            if req.kind is RequestKind.INTERISLAND_TRANSFER:
                try:
                    result = plan(self.scenario, root, self.gen, self.search)
                except InfeasibleActionError as exc:
                    raise ServiceError("infeasible", str(exc), None, 422) from None
                chosen = result.chosen
            else:
                # point-of-injury pickups fly direct to the island base
                chosen = DIRECT
                result = None
            tl = build_timeline(self.scenario, req, chosen, root.clock, fwd_free, rear_free)
            if tl is None:
                raise ServiceError("infeasible", f"action {chosen.label} infeasible against live availability", None, 422)
            if result is None:
                result = PlanResult(
                    chosen=chosen,
                    per_action_scores={chosen.label: 0.0},
                    per_action_visits={chosen.label: 0},
                    schedule=dispatch_schedule(tl),
                    predicted_response_time=response_time(tl),
                    tree_diagnostics=[],
                )
            t_h1, t_h2 = employment_times(tl)
            mission = MissionRecord(
                request=req,
                plan=result,
                forward_dispatch=tl.forward_dispatch,
                rear_dispatch=tl.rear_dispatch,
                handoff_time=tl.handoff_time,
                delivery_time=tl.delivery_time,
                planned_rear_dispatch=tl.rear_dispatch,
                predicted_handoff_gap=result.schedule.predicted_handoff_gap,
            )
            mission.forward_busy_until = tl.forward_dispatch + t_h1
            mission.rear_busy_until = (
                tl.rear_dispatch + t_h2 if tl.rear_dispatch is not None else 0.0
            )
            mission.exchange_x = tl.exchange_x
            mission.exchange_y = tl.exchange_y
            self.missions[req.id] = mission
            self._emit(mission, "plan.created", self._mission_json(mission))
            return mission

    def inject_delay(self, mission_id: str, cause: str, minutes: float) -> MissionRecord:
        """Shift the forward-leg chain (handoff, rear dispatch, delivery) by
        exactly `minutes`; the predicted handoff gap is unchanged."""
        with self._lock:
            mission = self._get(mission_id)
            now = self.clock.now()
            if mission.aborted:
                raise ServiceError("mission_state", "mission is aborted", None, 409)
            if mission.past_handoff(now):
                raise ServiceError(
                    "mission_state",
                    f"mission {mission_id} is past handoff; rear leg can no longer be rescheduled",
                    None,
                    409,
                )
            try:
                minutes = float(minutes)
            except (TypeError, ValueError):
                raise ServiceError("invalid_field", "minutes must be a number", "minutes") from None
            if minutes < 0:
                raise ServiceError("invalid_field", "minutes must be non-negative", "minutes")
            old = self._schedule_json(mission)
            shift = minutes / MINUTES_PER_HOUR
            if mission.handoff_time is not None:
                mission.handoff_time += shift
            if mission.rear_dispatch is not None:
                mission.rear_dispatch += shift
            mission.delivery_time += shift
            if mission.rear_busy_until:
                mission.rear_busy_until += shift
            mission.forward_busy_until += shift
            mission.injected_delays.append((str(cause), minutes))
            self._emit(
                mission,
                "plan.updated",
                {
                    "cause": str(cause),
                    "minutes": minutes,
                    "old_schedule": old,
                    "new_schedule": self._schedule_json(mission),
                },
            )
            return mission

    # ---- reads --------------------------------------------------------
    def _get(self, mission_id: str) -> MissionRecord:
        try:
            return self.missions[mission_id]
        except KeyError:
            raise ServiceError("not_found", f"unknown mission {mission_id!r}", None, 404) from None

    def get_mission(self, mission_id: str) -> dict:
        return self._mission_json(self._get(mission_id))

    def _schedule_json(self, m: MissionRecord) -> dict:
        return {
            "forward_dispatch": self.iso(m.forward_dispatch),
            "rear_dispatch": self.iso(m.rear_dispatch),
            "handoff_time": self.iso(m.handoff_time),
            "delivery_time": self.iso(m.delivery_time),
            "predicted_handoff_gap_minutes": m.predicted_handoff_gap * MINUTES_PER_HOUR,
        }

    def _mission_json(self, m: MissionRecord) -> dict:
        now = self.clock.now()
        return {
            "request": m.request.to_json(),
            "chosen_action": m.plan.chosen.label,
            "per_action_scores": m.plan.per_action_scores,
            "per_action_visits": m.plan.per_action_visits,
            "predicted_response_minutes": m.plan.predicted_response_time * MINUTES_PER_HOUR,
            "schedule": self._schedule_json(m),
            "exchange_point": (
                {"x": m.exchange_x, "y": m.exchange_y}
                if getattr(m, "exchange_x", None) is not None
                else None
            ),
            "status": m.status_at(now).value,
            "injected_delays": [{"cause": c, "minutes": mn} for c, mn in m.injected_delays],
            "delay_total_minutes": m.delay_total_minutes(),
            "events": list(m.actual_events),
        }

    def get_state(self) -> dict:
        now = self.clock.now()
        craft = []
        for route in self.scenario.watercraft:
            pos, vel = watercraft_position(route, now)
            craft.append({"id": route.id, "x": pos.x, "y": pos.y, "vx": vel.x, "vy": vel.y})
        fwd_free = max([now] + [m.forward_busy_until for m in self.missions.values() if not m.aborted])
        rear_free = max([now] + [m.rear_busy_until for m in self.missions.values() if not m.aborted])
        return {
            "sim_time_h": now,
            "timestamp": self.iso(now),
            "watercraft": craft,
            "aircraft": [
                {
                    "platoon": "fsmp",
                    "busy": fwd_free > now,
                    "free_at": self.iso(fwd_free),
                },
                {
                    "platoon": "asmp",
                    "busy": rear_free > now,
                    "free_at": self.iso(rear_free),
                },
            ],
            "missions": [self._mission_json(m) for m in self.missions.values()],
        }

    def close(self) -> None:
        if self._log_file is not None:
            self._log_file.close()
            self._log_file = None


def replay_log(scenario: Scenario, lines) -> dict[str, dict]:
    """Rebuild mission state from a persisted event log.

    Returns mission-id -> {schedule, injected_delays, last_seq}; applying
    the same log twice yields identical results (events are the source of
    truth, no planner calls are made).
    """
    missions: dict[str, dict] = {}
    last_seq = 0
    for line in lines:
        if isinstance(line, str):
            line = line.strip()
            if not line:
                continue
            event = json.loads(line)
        else:
            event = line
        if event["seq"] <= last_seq:
            raise ValueError("event log sequence numbers must strictly increase")
        last_seq = event["seq"]
        kind = event["type"]
        if kind == "plan.created":
            payload = event["payload"]
            mid = payload["request"]["id"]
            missions[mid] = {
                "request": payload["request"],
                "chosen_action": payload["chosen_action"],
                "schedule": payload["schedule"],
                "injected_delays": [],
                "last_seq": event["mission_seq"],
            }
        elif kind == "plan.updated":
            mid = event["mission_id"]
            rec = missions[mid]
            if event["mission_seq"] <= rec["last_seq"]:
                raise ValueError("per-mission sequence numbers must strictly increase")
            rec["last_seq"] = event["mission_seq"]
            rec["schedule"] = event["payload"]["new_schedule"]
            rec["injected_delays"].append(
                {
                    "cause": event["payload"]["cause"],
                    "minutes": event["payload"]["minutes"],
                }
            )
    return missions


def create_app(service: DispatchService):
    """FastAPI wrapper over a DispatchService."""
    app = FastAPI(title="medevacsim dispatch service")
    app.state.service = service

    @app.exception_handler(ServiceError)
    async def service_error(_request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status, content=exc.to_json())

    @app.post("/api/requests", status_code=201)
    async def submit(request: Request):
        try:
            payload = await request.json()
        except Exception:
            raise ServiceError("invalid_payload", "body must be valid JSON") from None
        mission = service.submit_request(payload)
        return service._mission_json(mission)

    @app.post("/api/missions/{mission_id}/delays")
    async def delay(mission_id: str, request: Request):
        try:
            payload = await request.json()
        except Exception:
            raise ServiceError("invalid_payload", "body must be valid JSON") from None
        cause = payload.get("cause", "unspecified")
        if "minutes" not in payload:
            raise ServiceError("missing_field", "minutes is required", "minutes")
        mission = service.inject_delay(mission_id, cause, payload["minutes"])
        return service._mission_json(mission)

    @app.get("/api/missions/{mission_id}")
    async def mission(mission_id: str):
        return service.get_mission(mission_id)

    @app.get("/api/state")
    async def state():
        return service.get_state()

    @app.get("/api/events")
    async def events(request: Request, after: int = 0, follow: bool = True):
        q = service.subscribe() if follow else None
        backlog = [e for e in service.events if e["seq"] > after]

        async def stream():
            import anyio

            try:
                for event in backlog:
                    yield f"id: {event['seq']}\ndata: {json.dumps(event)}\n\n"
                if q is None:
                    return
                seen = backlog[-1]["seq"] if backlog else after
                while True:
                    if await request.is_disconnected():
                        break
                    try:
                        event = await anyio.to_thread.run_sync(lambda: q.get(timeout=0.5))
                    except queue.Empty:
                        yield ": keepalive\n\n"
                        continue
                    if event["seq"] <= seen:
                        continue
                    seen = event["seq"]
                    yield f"id: {event['seq']}\ndata: {json.dumps(event)}\n\n"
            finally:
                if q is not None:
                    service.unsubscribe(q)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app
