"""Motion by curvature of planar curve networks with triple junctions."""

from .errors import CurvenetError
from .geometry import (
    CurveEnd,
    DiscreteCurve,
    Endpoint,
    Loop,
    Network,
    NetworkTopology,
    check_embedded,
    check_regular,
    find_loops,
)
from .flow_solver import FlowState, SolverConfig, Trajectory, check_admissible, evolve, make_admissible, step

__version__ = "0.1.0"

__all__ = [
    "CurveEnd",
    "CurvenetError",
    "DiscreteCurve",
    "Endpoint",
    "FlowState",
    "Loop",
    "Network",
    "NetworkTopology",
    "SolverConfig",
    "Trajectory",
    "check_admissible",
    "check_embedded",
    "check_regular",
    "evolve",
    "find_loops",
    "make_admissible",
    "step",
]
