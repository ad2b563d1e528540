"""Mission timelines: intercept solutions, leg decomposition, dispatch times.

Leg semantics (forward aircraft F1..F3, rear aircraft A1..A5):

  watercraft exchange
    F1 base->pickup transit + pickup service
    F2 pickup->intercept transit + patient drop-off (hoist down)
    F3 exchange->base return + refuel
    A1 base->vessel transit (rear launches so as to arrive when drop-off
       completes; clamped by availability)
    A2 on-station wait + patient hoist up
    A3 vessel->role-3 transit
    A4 role-3->base return
    A5 refuel
  land exchange
    F2 pickup->AXP transit + handoff; rear is dispatched when the forward
    drop-off completes; A1 base->AXP, A2 handoff + AXP->role-3,
    A3 return + refuel, A4 = A5 = 0
  direct
    F1 extends through role-3 delivery, F2 = 0, all A legs zero

Response time T and employment times follow the case analysis:
  T = F1+F2+A2+A3 (watercraft), F1+F2+A1+A2 (land), F1 (direct)
  T_h1 = F1+F2+F3; T_h2 = sum(A1..A5), A1+A2+A3, or 0 by the same cases.

All functions are pure over immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .actions import ActionKind, ExchangeAction
from .casualty import EvacRequest, RequestKind
from .scenario import GeoPoint, Scenario, WatercraftRoute, watercraft_position


def intercept_time(
    chaser_pos: GeoPoint,
    chaser_speed: float,
    target_pos: GeoPoint,
    target_vel: GeoPoint,
) -> float | None:
    """Earliest non-negative intercept time in hours, or None if the target
    is faster and opening."""
    if chaser_speed <= 0:
        raise ValueError("chaser_speed must be positive")
    t = kernels.intercept_time(
        target_pos.x - chaser_pos.x,
        target_pos.y - chaser_pos.y,
        target_vel.x,
        target_vel.y,
        chaser_speed,
    )
    return None if t < 0 else t


def route_intercept(
    route: WatercraftRoute,
    chaser_x: float,
    chaser_y: float,
    chaser_speed: float,
    depart_t: float,
) -> tuple[float, float, float] | None:
    """Chase a craft along its published route, departing at depart_t.

    Returns (arrival time, x, y) of the earliest intercept, or None when no
    segment admits one. Before the first waypoint and after the last the
    craft is treated as stationary.
    """
    wps = route.waypoints
    first_p, first_t = wps[0]
    if depart_t < first_t:
        # craft holds at the start until its route begins
        d = kernels.distance(chaser_x, chaser_y, first_p.x, first_p.y)
        arr = depart_t + d / chaser_speed
        if arr <= first_t:
            return arr, first_p.x, first_p.y
    for i in range(1, len(wps)):
        p1, t1 = wps[i]
        if t1 <= depart_t:
            continue
        p0, t0 = wps[i - 1]
        seg = t1 - t0
        vx = (p1.x - p0.x) / seg
        vy = (p1.y - p0.y) / seg
        # virtual target start: segment line extrapolated back to depart_t
        sx = p0.x + vx * (depart_t - t0)
        sy = p0.y + vy * (depart_t - t0)
        t = kernels.intercept_time(sx - chaser_x, sy - chaser_y, vx, vy, chaser_speed)
        if t >= 0.0:
            arr = depart_t + t
            if max(t0, depart_t) - 1e-12 <= arr <= t1 + 1e-12:
                return arr, sx + vx * t, sy + vy * t
    last_p, last_t = wps[-1]
    d = kernels.distance(chaser_x, chaser_y, last_p.x, last_p.y)
    arr = max(depart_t + d / chaser_speed, last_t)
    return arr, last_p.x, last_p.y


@dataclass(frozen=True)
class MissionTimeline:
    action: ExchangeAction
    f1: float
    f2: float
    f3: float
    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    forward_dispatch: float  # absolute hours
    rear_dispatch: float | None
    handoff_time: float | None  # forward drop-off completion
    delivery_time: float
    exchange_x: float | None = None
    exchange_y: float | None = None

    @property
    def legs_forward(self) -> tuple[float, float, float]:
        return (self.f1, self.f2, self.f3)

    @property
    def legs_rear(self) -> tuple[float, float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.a4, self.a5)


@dataclass(frozen=True)
class DispatchSchedule:
    forward_dispatch: float
    rear_dispatch: float | None
    predicted_handoff_gap: float  # rear on-station arrival minus drop-off completion


def response_time(tl: MissionTimeline) -> float:
    """Incident response time T in hours by the action-category cases."""
    kind = tl.action.kind
    if kind is ActionKind.WATERCRAFT:
        return tl.f1 + tl.f2 + tl.a2 + tl.a3
    if kind is ActionKind.LAND_AXP:
        return tl.f1 + tl.f2 + tl.a1 + tl.a2
    return tl.f1


def employment_times(tl: MissionTimeline) -> tuple[float, float]:
    """(T_h1, T_h2): per-aircraft employment hours for this mission."""
    t_h1 = tl.f1 + tl.f2 + tl.f3
    kind = tl.action.kind
    if kind is ActionKind.WATERCRAFT:
        t_h2 = tl.a1 + tl.a2 + tl.a3 + tl.a4 + tl.a5
    elif kind is ActionKind.LAND_AXP:
        t_h2 = tl.a1 + tl.a2 + tl.a3
    else:
        t_h2 = 0.0
    return t_h1, t_h2


def build_timeline(
    scenario: Scenario,
    request: EvacRequest,
    action: ExchangeAction,
    now: float,
    forward_free: float = 0.0,
    rear_free: float = 0.0,
) -> MissionTimeline | None:
    """Construct the leg decomposition for one action, or None if infeasible
    (unreachable intercept or a transit leg beyond the range cap)."""
    if action.kind is not ActionKind.DIRECT and request.kind is not RequestKind.INTERISLAND_TRANSFER:
        raise ValueError("exchange actions only apply to interisland transfers")
    spec = scenario.aircraft_spec
    v = spec.cruise_speed
    max_leg = spec.max_leg_range
    fwd_base = scenario.forward_base.location
    rear_base = scenario.rear_base.location
    origin = scenario.facility(request.origin).location
    dest = scenario.facility(request.destination).location

    fd = max(now, forward_free)
    d_pickup = kernels.distance(fwd_base.x, fwd_base.y, origin.x, origin.y)
    if d_pickup > max_leg:
        return None
    f1 = d_pickup / v + spec.pickup_duration

    if action.kind is ActionKind.DIRECT:
        d_out = kernels.distance(origin.x, origin.y, dest.x, dest.y)
        d_home = kernels.distance(dest.x, dest.y, fwd_base.x, fwd_base.y)
        if d_out > max_leg or d_home > max_leg:
            return None
        f1 += d_out / v
        return MissionTimeline(
            action=action,
            f1=f1,
            f2=0.0,
            f3=d_home / v + spec.refuel_duration,
            a1=0.0,
            a2=0.0,
            a3=0.0,
            a4=0.0,
            a5=0.0,
            forward_dispatch=fd,
            rear_dispatch=None,
            handoff_time=None,
            delivery_time=fd + f1,
        )

    role3 = scenario.role3.location

    if action.kind is ActionKind.LAND_AXP:
        axp = scenario.facility(action.target_id).location
        d_to_axp = kernels.distance(origin.x, origin.y, axp.x, axp.y)
        d_axp_home = kernels.distance(axp.x, axp.y, fwd_base.x, fwd_base.y)
        d_rear_axp = kernels.distance(rear_base.x, rear_base.y, axp.x, axp.y)
        d_axp_r3 = kernels.distance(axp.x, axp.y, role3.x, role3.y)
        d_r3_home = kernels.distance(role3.x, role3.y, rear_base.x, rear_base.y)
        if max(d_to_axp, d_axp_home, d_rear_axp, d_axp_r3, d_r3_home) > max_leg:
            return None
        f2 = d_to_axp / v + spec.handoff_duration
        drop_done = fd + f1 + f2
        rd = max(drop_done, rear_free)  # dispatched at handoff notification
        a1 = d_rear_axp / v
        arrive_r = rd + a1
        a2 = spec.handoff_duration + d_axp_r3 / v
        return MissionTimeline(
            action=action,
            f1=f1,
            f2=f2,
            f3=d_axp_home / v + spec.refuel_duration,
            a1=a1,
            a2=a2,
            a3=d_r3_home / v + spec.refuel_duration,
            a4=0.0,
            a5=0.0,
            forward_dispatch=fd,
            rear_dispatch=rd,
            handoff_time=drop_done,
            delivery_time=arrive_r + a2,
            exchange_x=axp.x,
            exchange_y=axp.y,
        )

    # watercraft exchange
    route = scenario.route(action.target_id)
    depart_pickup = fd + f1
    hit = route_intercept(route, origin.x, origin.y, v, depart_pickup)
    if hit is None:
        return None
    t_arr, ix, iy = hit
    d_to_vessel = (t_arr - depart_pickup) * v
    if d_to_vessel > max_leg:
        return None
    f2 = (t_arr - depart_pickup) + spec.handoff_duration
    drop_done = t_arr + spec.handoff_duration
    drop_pos, _ = watercraft_position(route, drop_done)
    d_rear_ideal = kernels.distance(rear_base.x, rear_base.y, drop_pos.x, drop_pos.y)
    rd_ideal = drop_done - d_rear_ideal / v
    rd = max(rd_ideal, now, rear_free)
    if rd <= rd_ideal + 1e-12:
        arrive_r = drop_done
        a1 = d_rear_ideal / v
        hoist_x, hoist_y = drop_pos.x, drop_pos.y
    else:
        late = route_intercept(route, rear_base.x, rear_base.y, v, rd)
        if late is None:
            return None
        arrive_r, hoist_x, hoist_y = late
        a1 = arrive_r - rd
    if a1 * v > max_leg:
        return None
    a2 = spec.handoff_duration  # rear arrives at or after drop-off completion
    pickup_done = arrive_r + a2
    lift_pos, _ = watercraft_position(route, pickup_done)
    d_r3 = kernels.distance(lift_pos.x, lift_pos.y, role3.x, role3.y)
    d_r3_home = kernels.distance(role3.x, role3.y, rear_base.x, rear_base.y)
    d_fwd_home = kernels.distance(ix, iy, fwd_base.x, fwd_base.y)
    if max(d_r3, d_r3_home, d_fwd_home) > max_leg:
        return None
    a3 = d_r3 / v
    return MissionTimeline(
        action=action,
        f1=f1,
        f2=f2,
        f3=d_fwd_home / v + spec.refuel_duration,
        a1=a1,
        a2=a2,
        a3=a3,
        a4=d_r3_home / v,
        a5=spec.refuel_duration,
        forward_dispatch=fd,
        rear_dispatch=rd,
        handoff_time=drop_done,
        delivery_time=pickup_done + a3,
        exchange_x=ix,
        exchange_y=iy,
    )


def dispatch_schedule(tl: MissionTimeline) -> DispatchSchedule:
    if tl.rear_dispatch is None or tl.handoff_time is None:
        return DispatchSchedule(tl.forward_dispatch, None, 0.0)
    arrive_r = tl.rear_dispatch + tl.a1
    return DispatchSchedule(
        forward_dispatch=tl.forward_dispatch,
        rear_dispatch=tl.rear_dispatch,
        predicted_handoff_gap=max(0.0, arrive_r - tl.handoff_time),
    )


def compute_dispatch_schedule(
    scenario: Scenario,
    request: EvacRequest,
    action: ExchangeAction,
    now: float,
    forward_free: float = 0.0,
    rear_free: float = 0.0,
) -> DispatchSchedule | None:
    """Dispatch times for both aircraft; rear launch targets zero handoff gap."""
    tl = build_timeline(scenario, request, action, now, forward_free, rear_free)
    return None if tl is None else dispatch_schedule(tl)
