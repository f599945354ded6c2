"""Network builders and cached flows shared by the test modules."""

import math
from functools import lru_cache

import numpy as np

from curvenet import flow_solver as fs
from curvenet import geometry as geo
from curvenet import selfsimilar as ss
from curvenet.geometry import FINISH, START, CurveEnd, DiscreteCurve, Endpoint, Network, NetworkTopology

BUMPS = (0.3, -0.2, -0.1)

# PASS/FAIL lines collected by the acceptance suite for the terminal summary
ACCEPTANCE_LINES: list[str] = []


def curved_triod(n: int = 100, bumps=BUMPS) -> Network:
    """Unit legs at 120 degrees bent by b x^2 (1-x)^3 along their normals.

    The bumps give junction curvatures 2 b_i, which sum to zero, and vanish
    to second order at the pinned far ends.
    """
    x = np.linspace(0.0, 1.0, n + 1)[:, None]
    curves, endpoints = [], []
    for i, b in enumerate(bumps):
        ang = 2 * math.pi * i / 3
        e = np.array([math.cos(ang), math.sin(ang)])
        normal = np.array([-e[1], e[0]])
        pts = x * e + b * x**2 * (1 - x) ** 3 * normal
        pts[-1] = e
        cid = f"c{i}"
        curves.append(DiscreteCurve(pts, cid))
        endpoints.append(Endpoint(CurveEnd(cid, FINISH), tuple(e)))
    junction = tuple(CurveEnd(f"c{i}", START) for i in range(3))
    return Network(tuple(curves), NetworkTopology((junction,), tuple(endpoints)))


def straight_triod(n: int = 20, leg: float = 1.0, center=(0.0, 0.0)) -> Network:
    return ss.standard_triod(scale=leg, n=n, center=center)


def flow(network: Network, dt: float, t_max: float, record_every: int = 1, **cfg) -> fs.Trajectory:
    config = fs.SolverConfig(dt=dt, record_every=record_every, **cfg)
    return fs.evolve(fs.FlowState(0.0, network, dt), config, t_max)


@lru_cache(maxsize=None)
def circle_flow(n: int = 200, dt: float = 1e-5, record_every: int = 10) -> fs.Trajectory:
    net = geo.closed_network(geo.circle_curve(1.0, n))
    return flow(net, dt, 0.6, record_every)


@lru_cache(maxsize=None)
def spoon_network(spacing: float = 0.02) -> Network:
    return fs.make_admissible(ss.find_brakke_spoon(spacing=spacing).network)


@lru_cache(maxsize=None)
def lens_network(spacing: float = 0.02) -> Network:
    return fs.make_admissible(ss.find_lens(spacing=spacing).network)


@lru_cache(maxsize=None)
def spoon_flow(dt: float = 2e-5, record_every: int = 25) -> fs.Trajectory:
    return flow(spoon_network(), dt, 0.6, record_every)


@lru_cache(maxsize=None)
def lens_flow(dt: float = 2e-5, record_every: int = 25) -> fs.Trajectory:
    return flow(lens_network(), dt, 0.6, record_every)


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    d = np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])
    return float(max(d.min(axis=0).max(), d.min(axis=1).max()))
