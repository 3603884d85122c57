"""Radially symmetric steady states, perturbation modes and bifurcation
points of a vascular tumor free-boundary model with a fixed necrotic core
and chemotaxis, with independent finite-difference verification of every
closed form."""

from .backend import BACKEND
from .params import DimensionalParams, ModelParams, nondimensionalize
from .steady import SteadyState, build_steady_state
from .modes import ModeSolution, build_mode
from .bifurcation import BifurcationResult, bifurcation_point

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BifurcationResult",
    "DimensionalParams",
    "ModeSolution",
    "ModelParams",
    "SteadyState",
    "__version__",
    "bifurcation_point",
    "build_mode",
    "build_steady_state",
    "nondimensionalize",
]
