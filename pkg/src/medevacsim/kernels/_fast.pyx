# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the numeric hot kernels.

Mirrors kernels._reference exactly; see that module for semantics.
"""

from libc.math cimport sqrt, exp, pow, hypot, fabs

INFEASIBLE = -1.0


cpdef double intercept_time(double dx, double dy, double vx, double vy, double speed):
    cdef double a = vx * vx + vy * vy - speed * speed
    cdef double b = 2.0 * (dx * vx + dy * vy)
    cdef double c = dx * dx + dy * dy
    cdef double disc, sq, t1, t2, tmp
    if c == 0.0:
        return 0.0
    if fabs(a) < 1e-12:
        if b >= 0.0:
            return -1.0
        return -c / b
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return -1.0
    sq = sqrt(disc)
    t1 = (-b - sq) / (2.0 * a)
    t2 = (-b + sq) / (2.0 * a)
    if t1 > t2:
        tmp = t1
        t1 = t2
        t2 = tmp
    if t1 >= 0.0:
        return t1
    if t2 >= 0.0:
        return t2
    return -1.0


cpdef double fused_reward(double t_minutes, double scale, double shape, double slope):
    cdef double weibull = exp(-pow(t_minutes / scale, shape))
    cdef double linear = 1.0 - slope * t_minutes
    return weibull if weibull > linear else linear


cpdef double distance(double x0, double y0, double x1, double y1):
    return hypot(x1 - x0, y1 - y0)
