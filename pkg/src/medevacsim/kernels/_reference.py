"""Pure-Python reference implementations of the numeric hot kernels.

These are the fallback used when the compiled extension is unavailable, and
the ground truth the extension is benchmarked and tested against.
"""

import math

INFEASIBLE = -1.0


def intercept_time(dx, dy, vx, vy, speed):
    """Earliest non-negative time for a chaser at the origin moving at
    `speed` to reach a target at offset (dx, dy) with velocity (vx, vy).

    Solves (|v|^2 - speed^2) t^2 + 2 (d.v) t + |d|^2 = 0 and returns the
    smallest root t >= 0, or INFEASIBLE when the target cannot be caught.
    """
    a = vx * vx + vy * vy - speed * speed
    b = 2.0 * (dx * vx + dy * vy)
    c = dx * dx + dy * dy
    if c == 0.0:
        return 0.0
    if abs(a) < 1e-12:
        # target speed equals chaser speed: linear equation b t + c = 0
        if b >= 0.0:
            return INFEASIBLE
        return -c / b
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return INFEASIBLE
    sq = math.sqrt(disc)
    t1 = (-b - sq) / (2.0 * a)
    t2 = (-b + sq) / (2.0 * a)
    if t1 > t2:
        t1, t2 = t2, t1
    if t1 >= 0.0:
        return t1
    if t2 >= 0.0:
        return t2
    return INFEASIBLE


def fused_reward(t_minutes, scale, shape, slope):
    """Survival/clearance fusion: max of a Weibull survival curve and a
    linear clearance ramp, both anchored at 1.0 for t = 0."""
    weibull = math.exp(-((t_minutes / scale) ** shape))
    linear = 1.0 - slope * t_minutes
    return weibull if weibull > linear else linear


def distance(x0, y0, x1, y1):
    return math.hypot(x1 - x0, y1 - y0)
