"""Maritime medical-evacuation planning with moving watercraft exchange
points: scenario model, intercept kinematics, survival rewards, a
generative semi-Markov decision process, a root-parallel UCT planner, an
experiment harness, and a live dispatch service."""

from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
