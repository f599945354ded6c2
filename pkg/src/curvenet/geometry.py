"""Discrete differential geometry of sampled planar curves and networks.

Every curve is sampled on the uniform parameter grid ``x_j = j/N`` of [0, 1].
Derivatives with respect to ``x`` use second-order central differences at
interior nodes and second-order one-sided differences at the ends of open
curves; closed curves are treated periodically.

Sign conventions: ``nu`` is ``tau`` rotated anticlockwise by pi/2 and the
scalar curvature is ``k = <k_vec, nu>``, so an anticlockwise circle of
radius r has ``k = 1/r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateCurve, OpenLoop, TopologyError

START = "start"
FINISH = "finish"
_ENDS = (START, FINISH)


def rotate90(v: np.ndarray) -> np.ndarray:
    """Anticlockwise rotation by pi/2 along the last axis."""
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DiscreteCurve:
    """A regular curve sampled on a uniform parameter grid.

    Open curves hold ``N + 1`` samples (both ends included). Closed curves
    hold ``N`` distinct samples; the segment from the last sample back to the
    first closes the curve. ``truncated`` marks a curve standing in for an
    unbounded branch (a halfline cut at finite radius).
    """

    points: np.ndarray
    id: str = "c0"
    closed: bool = False
    truncated: bool = False

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"curve {self.id!r}: samples must have shape (n, 2), got {pts.shape}")
        if pts.shape[0] < 3:
            raise ValueError(f"curve {self.id!r}: need at least 3 samples")
        if not np.all(np.isfinite(pts)):
            raise ValueError(f"curve {self.id!r}: non-finite sample")
        seg = _segments(pts, self.closed)
        if np.any(np.all(seg == 0.0, axis=1)):
            raise DegenerateCurve(f"curve {self.id!r}: repeated consecutive samples")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def N(self) -> int:
        """Number of parameter intervals."""
        n = self.points.shape[0]
        return n if self.closed else n - 1

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def finish(self) -> np.ndarray:
        return self.points[-1]

    def end_point(self, end: str) -> np.ndarray:
        return self.points[0] if end == START else self.points[-1]

    def with_points(self, points) -> "DiscreteCurve":
        return DiscreteCurve(points, self.id, self.closed, self.truncated)

    def reversed(self) -> "DiscreteCurve":
        return self.with_points(self.points[::-1])

    def translated(self, offset) -> "DiscreteCurve":
        return self.with_points(self.points + np.asarray(offset, dtype=float))

    def scaled(self, factor: float, center=(0.0, 0.0)) -> "DiscreteCurve":
        c = np.asarray(center, dtype=float)
        return self.with_points(c + factor * (self.points - c))


class CurveEnd(NamedTuple):
    curve: str
    end: str


@dataclass(frozen=True)
class Endpoint:
    """A curve end pinned at a fixed position (Dirichlet condition)."""

    end: CurveEnd
    position: tuple[float, float]


@dataclass(frozen=True)
class NetworkTopology:
    junctions: tuple[tuple[CurveEnd, CurveEnd, CurveEnd], ...] = ()
    endpoints: tuple[Endpoint, ...] = ()


@dataclass(frozen=True, eq=False)
class Network:
    curves: tuple[DiscreteCurve, ...]
    topology: NetworkTopology = field(default_factory=NetworkTopology)

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))
        topo = self.topology
        junctions = tuple(tuple(CurveEnd(*e) for e in j) for j in topo.junctions)
        endpoints = tuple(
            ep if isinstance(ep, Endpoint) else Endpoint(CurveEnd(*ep[0]), tuple(ep[1]))
            for ep in topo.endpoints
        )
        endpoints = tuple(
            Endpoint(CurveEnd(*ep.end), (float(ep.position[0]), float(ep.position[1])))
            for ep in endpoints
        )
        object.__setattr__(self, "topology", NetworkTopology(junctions, endpoints))
        object.__setattr__(self, "_index", {c.id: i for i, c in enumerate(self.curves)})
        self._validate()

    def _validate(self):
        if len(self._index) != len(self.curves):
            raise TopologyError("duplicate curve ids")
        seen: dict[CurveEnd, str] = {}

        def claim(end: CurveEnd, owner: str):
            if end.curve not in self._index:
                raise TopologyError(f"{owner} references unknown curve {end.curve!r}")
            if end.end not in _ENDS:
                raise TopologyError(f"{owner}: end must be 'start' or 'finish', got {end.end!r}")
            if self.curve(end.curve).closed:
                raise TopologyError(f"{owner}: closed curve {end.curve!r} has no ends")
            if end in seen:
                raise TopologyError(f"curve end {end} claimed by {seen[end]} and {owner}")
            seen[end] = owner

        for p, junction in enumerate(self.topology.junctions):
            if len(junction) != 3 or len(set(junction)) != 3:
                raise TopologyError(f"junction {p} must reference three distinct curve ends")
            for e in junction:
                claim(e, f"junction {p}")
        positions = set()
        for r, ep in enumerate(self.topology.endpoints):
            claim(ep.end, f"endpoint {r}")
            if ep.position in positions:
                raise TopologyError(f"endpoint {r} shares position {ep.position} with another endpoint")
            positions.add(ep.position)
        for c in self.curves:
            if c.closed:
                continue
            for end in _ENDS:
                if CurveEnd(c.id, end) not in seen:
                    raise TopologyError(f"curve end ({c.id}, {end}) is neither a junction nor an endpoint")

    def curve(self, curve_id: str) -> DiscreteCurve:
        return self.curves[self._index[curve_id]]

    @property
    def ids(self) -> list[str]:
        return [c.id for c in self.curves]

    def with_curves(self, curves: Iterable[DiscreteCurve]) -> "Network":
        return Network(tuple(curves), self.topology)

    def map_points(self, fn) -> "Network":
        """Apply ``fn`` to every sample array and to the endpoint positions."""
        curves = [c.with_points(fn(c.points)) for c in self.curves]
        endpoints = tuple(
            Endpoint(ep.end, tuple(np.asarray(fn(np.asarray([ep.position], dtype=float)))[0]))
            for ep in self.topology.endpoints
        )
        return Network(tuple(curves), NetworkTopology(self.topology.junctions, endpoints))

    def all_points(self) -> np.ndarray:
        return np.concatenate([c.points for c in self.curves])

    def diameter(self) -> float:
        pts = self.all_points()
        span = pts.max(axis=0) - pts.min(axis=0)
        return float(np.hypot(*span))


@dataclass(frozen=True, eq=False)
class GeometricQuantities:
    tau: np.ndarray
    nu: np.ndarray
    k: np.ndarray | None = None
    k_vec: np.ndarray | None = None
    lam: np.ndarray | None = None
    s: np.ndarray | None = None
    speed: np.ndarray | None = None


@dataclass(frozen=True)
class Loop:
    """Oriented traversal of curves bounding a region.

    Each traversal is ``(curve_id, reversed)``; the concatenation is a closed
    polyline, oriented anticlockwise for loops produced by ``find_loops``.
    """

    traversals: tuple[tuple[str, bool], ...]
    name: str = "loop0"

    @property
    def m(self) -> int:
        return len({cid for cid, _ in self.traversals})

    @property
    def curve_ids(self) -> list[str]:
        return [cid for cid, _ in self.traversals]

    def reversed(self) -> "Loop":
        return Loop(tuple((cid, not rev) for cid, rev in reversed(self.traversals)), self.name)


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------


def _segments(points: np.ndarray, closed: bool) -> np.ndarray:
    if closed:
        return np.roll(points, -1, axis=0) - points
    return np.diff(points, axis=0)


def derivatives(curve: DiscreteCurve) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivatives with respect to the grid parameter x."""
    return point_derivatives(curve.points, curve.closed)


def point_derivatives(p: np.ndarray, closed: bool) -> tuple[np.ndarray, np.ndarray]:
    n = p.shape[0] if closed else p.shape[0] - 1
    if closed:
        nxt = np.roll(p, -1, axis=0)
        prv = np.roll(p, 1, axis=0)
        d1 = (nxt - prv) * (0.5 * n)
        d2 = (nxt - 2.0 * p + prv) * (n * n)
        return d1, d2
    d1 = np.empty_like(p)
    d2 = np.empty_like(p)
    d1[1:-1] = (p[2:] - p[:-2]) * (0.5 * n)
    d2[1:-1] = (p[2:] - 2.0 * p[1:-1] + p[:-2]) * (n * n)
    if p.shape[0] >= 6:
        # fourth-order one-sided stencils keep the end values as accurate as the interior
        d1[0] = (-25.0 * p[0] + 48.0 * p[1] - 36.0 * p[2] + 16.0 * p[3] - 3.0 * p[4]) * (n / 12.0)
        d1[-1] = (25.0 * p[-1] - 48.0 * p[-2] + 36.0 * p[-3] - 16.0 * p[-4] + 3.0 * p[-5]) * (n / 12.0)
        d2[0] = (45.0 * p[0] - 154.0 * p[1] + 214.0 * p[2] - 156.0 * p[3] + 61.0 * p[4] - 10.0 * p[5]) * (n * n / 12.0)
        d2[-1] = (45.0 * p[-1] - 154.0 * p[-2] + 214.0 * p[-3] - 156.0 * p[-4] + 61.0 * p[-5] - 10.0 * p[-6]) * (n * n / 12.0)
        return d1, d2
    d1[0] = (-3.0 * p[0] + 4.0 * p[1] - p[2]) * (0.5 * n)
    d1[-1] = (3.0 * p[-1] - 4.0 * p[-2] + p[-3]) * (0.5 * n)
    if p.shape[0] >= 4:
        d2[0] = (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) * (n * n)
        d2[-1] = (2.0 * p[-1] - 5.0 * p[-2] + 4.0 * p[-3] - p[-4]) * (n * n)
    else:
        d2[0] = d2[-1] = (p[0] - 2.0 * p[1] + p[2]) * (n * n)
    return d1, d2


def _speed(curve: DiscreteCurve, d1: np.ndarray) -> np.ndarray:
    speed = np.hypot(d1[:, 0], d1[:, 1])
    scale = max(length(curve), 1e-300)
    if np.any(speed <= 1e-14 * scale):
        j = int(np.argmin(speed))
        raise DegenerateCurve(f"curve {curve.id!r}: zero tangent at node {j}")
    return speed


def frames(curve: DiscreteCurve) -> GeometricQuantities:
    """Unit tangent and normal at every node."""
    d1, _ = derivatives(curve)
    speed = _speed(curve, d1)
    tau = d1 / speed[:, None]
    return GeometricQuantities(tau=tau, nu=rotate90(tau), speed=speed)


def curvature(curve: DiscreteCurve) -> tuple[np.ndarray, np.ndarray]:
    """Scalar curvature ``k`` and curvature vector at every node."""
    d1, d2 = derivatives(curve)
    speed = _speed(curve, d1)
    sp2 = speed * speed
    dot = np.einsum("ij,ij->i", d2, d1)
    k_vec = (d2 * sp2[:, None] - d1 * dot[:, None]) / (sp2 * sp2)[:, None]
    nu = rotate90(d1 / speed[:, None])
    k = np.einsum("ij,ij->i", k_vec, nu)
    return k, k_vec


def tangential_velocity(curve: DiscreteCurve) -> np.ndarray:
    """``lambda = <gamma_xx, tau> / |gamma_x|^2`` at every node."""
    d1, d2 = derivatives(curve)
    speed = _speed(curve, d1)
    return np.einsum("ij,ij->i", d2, d1) / speed**3


def quantities(curve: DiscreteCurve) -> GeometricQuantities:
    """All per-node quantities in one pass."""
    d1, d2 = derivatives(curve)
    speed = _speed(curve, d1)
    sp2 = speed * speed
    tau = d1 / speed[:, None]
    nu = rotate90(tau)
    dot = np.einsum("ij,ij->i", d2, d1)
    k_vec = (d2 * sp2[:, None] - d1 * dot[:, None]) / (sp2 * sp2)[:, None]
    k = np.einsum("ij,ij->i", k_vec, nu)
    lam = dot / (sp2 * speed)
    return GeometricQuantities(tau=tau, nu=nu, k=k, k_vec=k_vec, lam=lam, s=arclength(curve), speed=speed)


def segment_lengths(curve: DiscreteCurve) -> np.ndarray:
    seg = _segments(curve.points, curve.closed)
    return np.hypot(seg[:, 0], seg[:, 1])


def arclength(curve: DiscreteCurve) -> np.ndarray:
    """Cumulative arclength at every node (starting from 0 at node 0)."""
    seg = segment_lengths(curve)
    if curve.closed:
        seg = seg[:-1]
    return np.concatenate([[0.0], np.cumsum(seg)])


def length(curve: DiscreteCurve) -> float:
    return float(segment_lengths(curve).sum())


def total_length(network: Network) -> float:
    return float(sum(length(c) for c in network.curves))


def integrate(curve: DiscreteCurve, values: np.ndarray) -> float:
    """Trapezoid quadrature of nodal values against arclength."""
    seg = segment_lengths(curve)
    if curve.closed:
        return float(np.sum(0.5 * (values + np.roll(values, -1)) * seg))
    return float(np.sum(0.5 * (values[1:] + values[:-1]) * seg))


def spacing_ratio(curve: DiscreteCurve) -> float:
    seg = segment_lengths(curve)
    return float(seg.max() / seg.min())


# ---------------------------------------------------------------------------
# Curve ends
# ---------------------------------------------------------------------------


def end_sign(end: str) -> float:
    """+1 if the curve orientation leaves the end, -1 if it arrives at it."""
    return 1.0 if end == START else -1.0


def end_index(curve: DiscreteCurve, end: str) -> int:
    return 0 if end == START else curve.points.shape[0] - 1


def exterior_tangent(curve: DiscreteCurve, end: str) -> np.ndarray:
    """Unit tangent at a curve end pointing from the end into the curve."""
    fr = frames(curve)
    return end_sign(end) * fr.tau[end_index(curve, end)]


def ordered_junction(network: Network, junction) -> list[CurveEnd]:
    """Junction ends sorted anticlockwise by the angle of their exterior tangents."""
    angles = []
    for ce in junction:
        t = exterior_tangent(network.curve(ce.curve), ce.end)
        angles.append(math.atan2(t[1], t[0]))
    order = np.argsort(angles, kind="stable")
    return [junction[i] for i in order]


# ---------------------------------------------------------------------------
# Areas and loops
# ---------------------------------------------------------------------------


def loop_polyline(loop: Loop, network: Network, tol: float | None = None) -> np.ndarray:
    """Concatenated closed polyline of a loop (first point not repeated)."""
    pieces = []
    for cid, rev in loop.traversals:
        pts = network.curve(cid).points
        pieces.append(pts[::-1] if rev else pts)
    if tol is None:
        tol = 1e-6 * max(network.diameter(), 1e-300)
    closed_single = len(pieces) == 1 and network.curve(loop.traversals[0][0]).closed
    if not closed_single:
        for a, b in zip(pieces, pieces[1:] + pieces[:1]):
            gap = float(np.hypot(*(a[-1] - b[0])))
            if gap > tol:
                raise OpenLoop(f"loop {loop.name!r}: gap {gap:.3e} exceeds tolerance {tol:.3e}")
        pieces = [p[:-1] for p in pieces]
    return np.concatenate(pieces)


def shoelace(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def enclosed_area(loop: Loop, network: Network, tol: float | None = None) -> float:
    """Signed shoelace area, positive for anticlockwise loops."""
    return shoelace(loop_polyline(loop, network, tol))


def find_loops(network: Network) -> list[Loop]:
    """Bounded faces of the planar network, each oriented anticlockwise.

    Faces are traced on the half-edge structure with the face kept on the
    left. Faces whose boundary visits a fixed endpoint or traverses a curve
    twice are not regions bounded by junction arcs and are dropped.
    """
    loops: list[Loop] = []
    for c in network.curves:
        if c.closed:
            trav = ((c.id, False),)
            lp = Loop(trav)
            if enclosed_area(lp, network) < 0:
                lp = lp.reversed()
            loops.append(lp)

    vertex_of: dict[CurveEnd, tuple[str, int]] = {}
    for p, j in enumerate(network.topology.junctions):
        for ce in j:
            vertex_of[ce] = ("J", p)
    for r, ep in enumerate(network.topology.endpoints):
        vertex_of[ep.end] = ("P", r)

    # half-edge: (curve_id, reversed); leaves vertex at its tail
    outgoing: dict[tuple[str, int], list[tuple[float, tuple[str, bool]]]] = {}
    for c in network.curves:
        if c.closed:
            continue
        for rev, end in ((False, START), (True, FINISH)):
            t = exterior_tangent(c, end)
            outgoing.setdefault(vertex_of[CurveEnd(c.id, end)], []).append(
                (math.atan2(t[1], t[0]), (c.id, rev))
            )
    for v in outgoing:
        outgoing[v].sort()

    def head(he):
        cid, rev = he
        return vertex_of[CurveEnd(cid, START if rev else FINISH)]

    def next_edge(he):
        cid, rev = he
        v = head(he)
        twin = (cid, not rev)
        edges = outgoing[v]
        i = [e for _, e in edges].index(twin)
        return edges[i - 1][1]

    visited = set()
    count = len(loops)
    for v, edges in sorted(outgoing.items()):
        for _, he in edges:
            if he in visited:
                continue
            cycle = []
            cur = he
            while cur not in visited:
                visited.add(cur)
                cycle.append(cur)
                cur = next_edge(cur)
            ids = [cid for cid, _ in cycle]
            touches_endpoint = any(head(e)[0] == "P" for e in cycle)
            if touches_endpoint or len(set(ids)) != len(ids):
                continue
            lp = Loop(tuple(cycle), name=f"loop{count}")
            if enclosed_area(lp, network) > 0:
                loops.append(lp)
                count += 1
    return [Loop(lp.traversals, name=f"loop{i}") for i, lp in enumerate(loops)]


# ---------------------------------------------------------------------------
# Regularity and embeddedness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JunctionRegularity:
    index: int
    concurrency_gap: float
    angle_residual: float


@dataclass(frozen=True)
class RegularityReport:
    junctions: tuple[JunctionRegularity, ...]
    concurrency_tol: float
    angle_tol: float

    @property
    def passed(self) -> bool:
        return all(
            j.concurrency_gap <= self.concurrency_tol and j.angle_residual <= self.angle_tol
            for j in self.junctions
        )

    @property
    def max_concurrency_gap(self) -> float:
        return max((j.concurrency_gap for j in self.junctions), default=0.0)

    @property
    def max_angle_residual(self) -> float:
        return max((j.angle_residual for j in self.junctions), default=0.0)


def check_regular(network: Network, concurrency_tol: float | None = None, angle_tol: float = 1e-6) -> RegularityReport:
    if concurrency_tol is None:
        concurrency_tol = 1e-9 * network.diameter()
    out = []
    for p, junction in enumerate(network.topology.junctions):
        pts = [network.curve(ce.curve).end_point(ce.end) for ce in junction]
        gap = max(float(np.hypot(*(a - b))) for i, a in enumerate(pts) for b in pts[i + 1:])
        tsum = sum(exterior_tangent(network.curve(ce.curve), ce.end) for ce in junction)
        out.append(JunctionRegularity(p, gap, float(np.hypot(*tsum))))
    return RegularityReport(tuple(out), concurrency_tol, angle_tol)


class IntersectionEvent(NamedTuple):
    curve_a: str
    segment_a: int
    curve_b: str
    segment_b: int
    point: tuple[float, float]


def _all_segments(network: Network):
    starts, ends, owner, index = [], [], [], []
    for c in network.curves:
        p = c.points
        q = np.roll(p, -1, axis=0) if c.closed else p[1:]
        a = p if c.closed else p[:-1]
        starts.append(a)
        ends.append(q)
        owner.extend([c.id] * len(a))
        index.extend(range(len(a)))
    return np.concatenate(starts), np.concatenate(ends), owner, index


def check_embedded(network: Network, chunk: int = 512) -> list[IntersectionEvent]:
    """Contacts between segments of the network that do not share a node.

    Consecutive segments and curves meeting at a junction share an endpoint
    exactly and are not reported; any other crossing or touching is.
    """
    a, b, owner, index = _all_segments(network)
    m = len(a)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    d = b - a
    events = []
    for i0 in range(0, m, chunk):
        i1 = min(m, i0 + chunk)
        overlap = (
            (lo[i0:i1, None, 0] <= hi[None, :, 0])
            & (lo[None, :, 0] <= hi[i0:i1, None, 0])
            & (lo[i0:i1, None, 1] <= hi[None, :, 1])
            & (lo[None, :, 1] <= hi[i0:i1, None, 1])
        )
        jj = np.arange(m)[None, :]
        ii = np.arange(i0, i1)[:, None]
        overlap &= jj > ii
        if not overlap.any():
            continue
        I, J = np.nonzero(overlap)
        A, B, D = a[I + i0], b[I + i0], d[I + i0]
        C, E, F = a[J], b[J], d[J]

        def cross(u, v):
            return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]

        o1 = cross(D, C - A)
        o2 = cross(D, E - A)
        o3 = cross(F, A - C)
        o4 = cross(F, B - C)
        shared = (
            np.all(A == C, axis=1) | np.all(A == E, axis=1) | np.all(B == C, axis=1) | np.all(B == E, axis=1)
        )
        hit = (o1 * o2 <= 0) & (o3 * o4 <= 0) & ~shared
        for k in np.nonzero(hit)[0]:
            gi, gj = I[k] + i0, J[k]
            denom = cross(D[k:k + 1], F[k:k + 1])[0]
            if denom == 0.0:  # collinear overlap
                pt = 0.5 * (np.maximum(A[k], C[k]) + np.minimum(B[k], E[k]))
            else:
                t = cross((C[k] - A[k])[None], F[k:k + 1])[0] / denom
                pt = A[k] + t * D[k]
            events.append(IntersectionEvent(owner[gi], index[gi], owner[gj], index[gj], (float(pt[0]), float(pt[1]))))
    return events


# ---------------------------------------------------------------------------
# Resampling
# ---------------------------------------------------------------------------


def resample_arclength(curve: DiscreteCurve, n_new: int | None = None) -> DiscreteCurve:
    """Equal-arclength resampling by linear interpolation; ends preserved."""
    if n_new is None:
        n_new = curve.N
    if n_new < 2:
        raise ValueError("need at least two intervals")
    seg = segment_lengths(curve)
    if np.any(seg == 0.0):
        raise DegenerateCurve(f"curve {curve.id!r}: zero-length segment")
    pts = curve.points
    if curve.closed:
        pts = np.vstack([pts, pts[:1]])
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    if curve.closed:
        targets = np.arange(n_new) * (total / n_new)
    else:
        targets = np.linspace(0.0, total, n_new + 1)
    new = np.column_stack([np.interp(targets, s, pts[:, 0]), np.interp(targets, s, pts[:, 1])])
    new[0] = pts[0]
    if not curve.closed:
        new[-1] = pts[-1]
    return curve.with_points(new)


# ---------------------------------------------------------------------------
# Constructors used throughout the package and its tests
# ---------------------------------------------------------------------------


def circle_curve(radius: float = 1.0, n: int = 200, center=(0.0, 0.0), curve_id: str = "circle",
                 clockwise: bool = False, phase: float = 0.0) -> DiscreteCurve:
    theta = phase + 2.0 * np.pi * np.arange(n) / n
    if clockwise:
        theta = -theta
    pts = np.column_stack([center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta)])
    return DiscreteCurve(pts, curve_id, closed=True)


def segment_curve(a: Sequence[float], b: Sequence[float], n: int = 10, curve_id: str = "c0") -> DiscreteCurve:
    x = np.linspace(0.0, 1.0, n + 1)[:, None]
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    pts = (1.0 - x) * a + x * b
    pts[-1] = b
    return DiscreteCurve(pts, curve_id)


def fixed_ends_network(curve: DiscreteCurve) -> Network:
    """A single open curve whose two ends are pinned where they are."""
    eps = (
        Endpoint(CurveEnd(curve.id, START), tuple(curve.start)),
        Endpoint(CurveEnd(curve.id, FINISH), tuple(curve.finish)),
    )
    return Network((curve,), NetworkTopology((), eps))


def closed_network(*curves: DiscreteCurve) -> Network:
    return Network(tuple(curves), NetworkTopology())
