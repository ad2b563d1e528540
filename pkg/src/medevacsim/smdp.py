"""Generative semi-Markov decision process for exchange-point selection.

A decision epoch holds one pending interisland transfer. Stepping the
process builds the mission timeline for the chosen exchange action,
advances the clock by the sojourn (time to resolve the transfer), services
point-of-injury requests that arrive meanwhile with whichever aircraft
reaches them first, and emits the fused transfer reward plus intermediate
rewards minus the optional utilization penalty.

States are value types: step() never mutates its inputs, so independent
searches can share a root state freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

from . import kernels
from .actions import ActionKind, ExchangeAction, action_catalog
from .casualty import EvacRequest, RequestKind
from .kinematics import MissionTimeline, build_timeline, employment_times
from .reward import (
    MINUTES_PER_HOUR,
    POINT_OF_INJURY_PRESET,
    TRANSFER_PRESET,
    PenaltyConfig,
    fused_reward,
    utilization_penalty,
)
from .scenario import Island, Scenario


class Platoon(Enum):
    FSMP = "fsmp"  # forward island
    ASMP = "asmp"  # rear island


class ActionSpace(Enum):
    A1 = "A1"  # watercraft + land AXPs + direct
    A2 = "A2"  # land AXPs + direct


class InfeasibleActionError(RuntimeError):
    pass


@dataclass(frozen=True)
class SmdpConfig:
    maintenance_rate: float = 0.002  # faults per cumulative flight hour
    replacement_delay: float = 2.0  # hours grounded after a fault
    utilization_window: float = 24.0  # trailing hours for U_h
    penalty: PenaltyConfig = field(default_factory=PenaltyConfig)
    multiply_transfer_by_patients: bool = False


DEFAULT_CONFIG = SmdpConfig()


@dataclass(frozen=True)
class AircraftState:
    platoon: Platoon
    busy_until: float = 0.0
    cumulative_flight_hours: float = 0.0
    utilization: float = 0.0
    fault_probability: float = 0.0
    replaced: bool = False
    intervals: tuple[tuple[float, float], ...] = ()  # employment spans

    def trailing_utilization(self, now: float, window: float = 24.0) -> float:
        lo = now - window
        busy = 0.0
        for start, end in self.intervals:
            busy += max(0.0, min(end, now) - max(start, lo))
        return min(1.0, busy / window)


@dataclass(frozen=True)
class SmdpState:
    clock: float
    aircraft: dict[Platoon, AircraftState]
    pending_request: EvacRequest | None
    rng_cursor: int = 0


@dataclass(frozen=True)
class TransitionOutcome:
    next_state: SmdpState
    reward: float
    sojourn: float
    timeline: MissionTimeline
    intermediate_log: tuple[tuple[str, float, float, Platoon], ...]
    reward_events: tuple[tuple[float, float], ...]  # (absolute hours, value)
    remaining_thread: list[EvacRequest]
    terminal: bool


def initial_state(thread: list[EvacRequest], clock: float = 0.0):
    """Root state plus the future thread (pending transfer removed).

    Returns (state, remaining). pending_request is the first interisland
    transfer in the thread, or None when the thread has no transfers.
    """
    pending = None
    remaining = []
    for r in thread:
        if pending is None and r.kind is RequestKind.INTERISLAND_TRANSFER:
            pending = r
            continue
        remaining.append(r)
    start = clock if pending is None else max(clock, pending.injury_time)
    state = SmdpState(
        clock=start,
        aircraft={
            Platoon.FSMP: AircraftState(Platoon.FSMP),
            Platoon.ASMP: AircraftState(Platoon.ASMP),
        },
        pending_request=pending,
    )
    return state, remaining


def legal_actions(
    scenario: Scenario, state: SmdpState, space: ActionSpace = ActionSpace.A1
) -> list[ExchangeAction]:
    """Feasible exchange actions at the current decision epoch."""
    if state.pending_request is None:
        return []
    req = state.pending_request
    fwd = state.aircraft[Platoon.FSMP]
    rear = state.aircraft[Platoon.ASMP]
    out = []
    for action in action_catalog(scenario, include_watercraft=space is ActionSpace.A1):
        tl = build_timeline(
            scenario, req, action, state.clock, fwd.busy_until, rear.busy_until
        )
        if tl is not None:
            out.append(action)
    # can be empty: range caps may rule out every action (treated terminal)
    return out


def maintenance_update(
    aircraft: AircraftState, employment: float, rng, cfg: SmdpConfig = DEFAULT_CONFIG
) -> AircraftState:
    """Accumulate flight hours, refresh the fault hazard, and draw for a
    maintenance fault; a fault grounds the aircraft for the replacement
    delay and swaps in a fresh airframe (hours reset)."""
    if employment < 0:
        raise ValueError("employment must be non-negative")
    hours = aircraft.cumulative_flight_hours + employment
    fault_p = 1.0 - math.exp(-cfg.maintenance_rate * hours)
    if fault_p > 0.0 and rng.random() < fault_p:
        return replace(
            aircraft,
            cumulative_flight_hours=0.0,
            fault_probability=0.0,
            replaced=True,
            busy_until=aircraft.busy_until + cfg.replacement_delay,
        )
    return replace(aircraft, cumulative_flight_hours=hours, fault_probability=fault_p)


def discounted_return(rewards, gamma: float) -> float:
    """Sojourn-aware discounting: sum of gamma^elapsed_hours * reward."""
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    if gamma == 1.0:
        return sum(r for r, _ in rewards)
    return sum(r * gamma**elapsed for r, elapsed in rewards)


def _base_location(scenario: Scenario, platoon: Platoon):
    return (
        scenario.forward_base.location
        if platoon is Platoon.FSMP
        else scenario.rear_base.location
    )


def _service_poi(scenario, aircraft, request, rng, cfg, gaps=None):
    """Fly one point-of-injury mission with the aircraft of the request's
    island platoon; requests queue FIFO and wait while that aircraft is
    busy. A mission short enough to finish inside the idle window before
    an already committed transfer dispatch flies in that window instead of
    queueing behind the whole transfer. Mutates the `aircraft` dict (and
    the gap table) in place; returns the log entry and reward event."""
    origin = scenario.facility(request.origin).location
    dest = scenario.facility(request.destination).location
    v = scenario.aircraft_spec.cruise_speed
    svc = scenario.aircraft_spec

    platoon = _home_platoon(scenario, request)
    ac = aircraft[platoon]
    base = _base_location(scenario, platoon)
    d_out = kernels.distance(base.x, base.y, origin.x, origin.y)
    d_leg = kernels.distance(origin.x, origin.y, dest.x, dest.y)
    d_home = kernels.distance(dest.x, dest.y, base.x, base.y)
    if max(d_out, d_leg, d_home) > svc.max_leg_range:
        raise InfeasibleActionError(f"no aircraft can reach request {request.id}")
    employment = (d_out + d_leg + d_home) / v + svc.pickup_duration + svc.refuel_duration
    dispatch = max(request.injury_time, ac.busy_until)
    if gaps is not None and platoon in gaps:
        gap_free, gap_close = gaps[platoon]
        candidate = max(request.injury_time, gap_free)
        if candidate + employment <= gap_close:
            dispatch = candidate
            gaps[platoon][0] = candidate + employment
    delivery = dispatch + d_out / v + svc.pickup_duration + d_leg / v
    done = dispatch + employment
    ac = aircraft[platoon]
    ac = replace(
        ac,
        busy_until=max(ac.busy_until, done),
        intervals=ac.intervals + ((dispatch, done),),
    )
    ac = maintenance_update(ac, employment, rng, cfg)
    aircraft[platoon] = ac
    t_x = (delivery - request.injury_time) * MINUTES_PER_HOUR
    value = fused_reward(POINT_OF_INJURY_PRESET, t_x) * request.patients
    return (request.id, t_x, value, platoon), (delivery, value)


def _home_platoon(scenario: Scenario, request: EvacRequest) -> Platoon:
    island = scenario.facility(request.origin).island
    return Platoon.FSMP if island is Island.FORWARD else Platoon.ASMP


def step(
    scenario: Scenario,
    state: SmdpState,
    action: ExchangeAction,
    thread: list[EvacRequest],
    rng,
    cfg: SmdpConfig = DEFAULT_CONFIG,
) -> TransitionOutcome:
    """Resolve the pending transfer with `action` and simulate forward to
    the next decision epoch."""
    req = state.pending_request
    if req is None:
        raise InfeasibleActionError("no pending request: state is terminal")
    window = cfg.utilization_window
    u1 = state.aircraft[Platoon.FSMP].trailing_utilization(state.clock, window)
    u2 = state.aircraft[Platoon.ASMP].trailing_utilization(state.clock, window)

    # Service requests chronologically: point-of-injury missions that arrived
    # before this decision epoch are dispatched first, then the transfer is
    # scheduled against the resulting availability.
    aircraft = dict(state.aircraft)
    intermediates = []
    events: list[tuple[float, float]] = []
    draws = 1
    pois_after: list[EvacRequest] = []
    transfers: list[EvacRequest] = []
    for r in thread:
        if r.kind is RequestKind.INTERISLAND_TRANSFER:
            transfers.append(r)
        elif r.injury_time <= req.injury_time:
            entry, event = _service_poi(scenario, aircraft, r, rng, cfg)
            intermediates.append(entry)
            events.append(event)
            draws += 1
        else:
            pois_after.append(r)

    fwd = aircraft[Platoon.FSMP]
    rear = aircraft[Platoon.ASMP]
    tl = build_timeline(
        scenario, req, action, state.clock, fwd.busy_until, rear.busy_until
    )
    if tl is None:
        raise InfeasibleActionError(f"action {action.label} infeasible at t={state.clock:.3f}")

    t_h1, t_h2 = employment_times(tl)
    penalty = utilization_penalty(cfg.penalty, t_h1, u1, t_h2, u2)

    fwd_end = tl.forward_dispatch + t_h1
    fwd2 = replace(
        fwd,
        busy_until=max(fwd.busy_until, fwd_end),
        intervals=fwd.intervals + ((tl.forward_dispatch, fwd_end),),
    )
    aircraft[Platoon.FSMP] = maintenance_update(fwd2, t_h1, rng, cfg)
    if tl.rear_dispatch is not None and t_h2 > 0.0:
        rear_end = tl.rear_dispatch + t_h2
        rear2 = replace(
            rear,
            busy_until=max(rear.busy_until, rear_end),
            intervals=rear.intervals + ((tl.rear_dispatch, rear_end),),
        )
        aircraft[Platoon.ASMP] = maintenance_update(rear2, t_h2, rng, cfg)
        draws += 1

    # idle windows left open between now and each committed dispatch
    gaps = {Platoon.FSMP: [fwd.busy_until, tl.forward_dispatch]}
    if tl.rear_dispatch is not None and t_h2 > 0.0:
        gaps[Platoon.ASMP] = [rear.busy_until, tl.rear_dispatch]

    epoch_end = tl.delivery_time
    transfer_t = (tl.delivery_time - req.injury_time) * MINUTES_PER_HOUR
    transfer_value = fused_reward(TRANSFER_PRESET, transfer_t)
    if cfg.multiply_transfer_by_patients:
        transfer_value *= req.patients

    events.append((tl.delivery_time, transfer_value))
    remaining: list[EvacRequest] = []
    next_transfer = transfers[0] if transfers else None
    remaining.extend(transfers[1:])
    for r in pois_after:
        if r.injury_time <= epoch_end:
            entry, event = _service_poi(scenario, aircraft, r, rng, cfg, gaps)
            intermediates.append(entry)
            events.append(event)
            draws += 1
        else:
            remaining.append(r)
    remaining.sort(key=lambda r: r.injury_time)

    next_clock = epoch_end if next_transfer is None else max(epoch_end, next_transfer.injury_time)
    for platoon, ac in aircraft.items():
        aircraft[platoon] = replace(
            ac, utilization=ac.trailing_utilization(next_clock, window)
        )

    reward_total = transfer_value + sum(v for _, _, v, _ in intermediates) - penalty
    next_state = SmdpState(
        clock=next_clock,
        aircraft=aircraft,
        pending_request=next_transfer,
        rng_cursor=state.rng_cursor + draws,
    )
    return TransitionOutcome(
        next_state=next_state,
        reward=reward_total,
        sojourn=epoch_end - state.clock,
        timeline=tl,
        intermediate_log=tuple(intermediates),
        reward_events=tuple(events),
        remaining_thread=remaining,
        terminal=next_transfer is None,
    )


def flush_pois(
    scenario: Scenario,
    state: SmdpState,
    thread: list[EvacRequest],
    rng,
    cfg: SmdpConfig = DEFAULT_CONFIG,
):
    """Service trailing point-of-injury requests after the final decision
    epoch. Returns (log entries, reward events)."""
    aircraft = dict(state.aircraft)
    logs = []
    events = []
    for r in thread:
        if r.kind is not RequestKind.POINT_OF_INJURY:
            continue
        entry, event = _service_poi(scenario, aircraft, r, rng, cfg)
        logs.append(entry)
        events.append(event)
    return logs, events
