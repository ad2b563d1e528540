"""Numeric hot kernels with a compiled core and pure-Python fallback.

The compiled extension (built from _fast.pyx) is preferred; set the
environment variable MEDEVACSIM_PURE=1 to force the reference versions.
`BACKEND` reports which implementation is active.
"""

import os

from . import _reference

INFEASIBLE = _reference.INFEASIBLE

if os.environ.get("MEDEVACSIM_PURE") == "1":
    _impl = _reference
    BACKEND = "python"
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _reference
        BACKEND = "python"

intercept_time = _impl.intercept_time
fused_reward = _impl.fused_reward
distance = _impl.distance

__all__ = ["BACKEND", "INFEASIBLE", "intercept_time", "fused_reward", "distance"]
