"""Time stepping of the special flow ``gamma_t = gamma_xx / |gamma_x|^2`` on networks.

The scheme is semi-implicit: the second difference is taken at the new time
level and the metric ``|gamma_x|^2`` is lagged, so every curve contributes a
tridiagonal system per coordinate. Fixed endpoints enter as Dirichlet rows.
A junction position ``X`` is shared by its three curves (concurrency holds
exactly), the interior of each curve is affine in the junction positions, and
the angle condition on the one-sided discrete tangents is solved for ``X`` by
Newton's method with the exact Jacobian of that affine map.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from . import geometry as geo
from .errors import (
    DegenerateCurve,
    NewtonDivergence,
    NonMonotoneReparam,
    NotGeometricallyAdmissible,
    SingularityDetected,
)
from .geometry import FINISH, START, CurveEnd, DiscreteCurve, Loop, Network

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class SolverConfig:
    dt: float = 1e-4
    max_newton_iters: int = 30
    newton_tol: float = 1e-12
    resample_threshold: float = 3.0
    L_min: float = 1e-2
    K_max: float = 20.0
    record_every: int = 1
    # classification of a detected singularity relative to the initial state
    collapse_ratio: float = 0.1
    blowup_ratio: float = 10.0
    halve_on_divergence: bool = False
    max_halvings: int = 6

    def __post_init__(self):
        positive = ("dt", "max_newton_iters", "newton_tol", "L_min", "K_max", "record_every")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"SolverConfig.{name} must be positive")
        if not self.resample_threshold > 1:
            raise ValueError("SolverConfig.resample_threshold must exceed 1")


@dataclass(frozen=True)
class FlowState:
    t: float
    network: Network
    dt: float
    step_count: int = 0


@dataclass(frozen=True)
class Termination:
    """Why ``evolve`` stopped.

    ``reason`` is ``"max-time"`` or ``"singularity"``; ``classification`` is one
    of ``"none"``, ``"length-collapse"``, ``"curvature-blow-up"``, ``"both"``.
    """

    reason: str
    t: float
    classification: str = "none"
    collapsing_curves: tuple[str, ...] = ()
    blowup_curves: tuple[str, ...] = ()
    values: dict = field(default_factory=dict)

    @property
    def singular(self) -> bool:
        return self.reason == "singularity"


@dataclass
class Trajectory:
    snapshots: list[tuple[float, Network]]
    diagnostics: list[dict]
    loops: list[Loop]
    termination: Termination | None = None
    config: SolverConfig | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.snapshots])

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.diagnostics], dtype=float)

    @property
    def final(self) -> Network:
        return self.snapshots[-1][1]


# ---------------------------------------------------------------------------
# Junction identities and admissibility
# ---------------------------------------------------------------------------


def end_quantities(curve: DiscreteCurve, end: str) -> dict:
    """Geometric quantities at a curve end, oriented away from the end."""
    q = geo.quantities(curve)
    j = geo.end_index(curve, end)
    sgn = geo.end_sign(end)
    d1, d2 = geo.derivatives(curve)
    return {
        "point": curve.points[j],
        "tau": sgn * q.tau[j],
        "k": sgn * q.k[j],
        "lam": sgn * q.lam[j],
        "speed": q.speed[j],
        "velocity": d2[j] / q.speed[j] ** 2,
        "gamma_xx": d2[j],
    }


@dataclass(frozen=True)
class JunctionResidual:
    index: int
    concurrency_gap: float
    tangent_sum: float
    k_sum: float
    lam_sum: float
    lam_formula: tuple[float, float, float]
    k2_minus_lam2: float
    k_lam: float

    @property
    def worst_identity(self) -> float:
        return max(self.k_sum, self.lam_sum, max(self.lam_formula), self.k2_minus_lam2, self.k_lam)


def junction_residuals(network: Network) -> list[JunctionResidual]:
    out = []
    for p, junction in enumerate(network.topology.junctions):
        ordered = geo.ordered_junction(network, junction)
        qs = [end_quantities(network.curve(ce.curve), ce.end) for ce in ordered]
        pts = [q["point"] for q in qs]
        gap = max(float(np.hypot(*(a - b))) for i, a in enumerate(pts) for b in pts[i + 1:])
        k = np.array([q["k"] for q in qs])
        lam = np.array([q["lam"] for q in qs])
        tsum = sum(q["tau"] for q in qs)
        formula = tuple(
            abs(lam[i] - (k[(i - 1) % 3] - k[(i + 1) % 3]) / SQRT3) for i in range(3)
        )
        out.append(
            JunctionResidual(
                index=p,
                concurrency_gap=gap,
                tangent_sum=float(np.hypot(*tsum)),
                k_sum=abs(float(k.sum())),
                lam_sum=abs(float(lam.sum())),
                lam_formula=tuple(float(v) for v in formula),
                k2_minus_lam2=abs(float(np.sum(k * k) - np.sum(lam * lam))),
                k_lam=abs(float(np.sum(k * lam))),
            )
        )
    return out


@dataclass(frozen=True)
class AdmissibilityReport:
    """Residuals of the admissibility conditions, numbered as in the definition.

    1 network structure, 2 regularity, 3 concurrency, 4 angle sum,
    5 equal ``gamma_xx/|gamma_x|^2`` at junctions, 6 endpoint positions,
    7 ``gamma_xx = 0`` at endpoints.
    """

    residuals: dict[int, float]
    tolerances: dict[int, float]

    @property
    def flags(self) -> dict[int, bool]:
        return {c: self.residuals[c] <= self.tolerances[c] for c in self.residuals}

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "conditions": {
                str(c): {"residual": self.residuals[c], "tolerance": self.tolerances[c], "pass": self.flags[c]}
                for c in sorted(self.residuals)
            },
        }


def check_admissible(network: Network, compat_tol: float = 1e-3, angle_tol: float = 1e-3,
                     concurrency_tol: float | None = None) -> AdmissibilityReport:
    if concurrency_tol is None:
        concurrency_tol = 1e-9 * max(network.diameter(), 1e-300)
    res = {1: 0.0, 2: 0.0, 3: 0.0, 4: 0.0, 5: 0.0, 6: 0.0, 7: 0.0}
    for c in network.curves:
        try:
            geo.frames(c)
        except DegenerateCurve:
            res[2] = math.inf
    if res[2] == 0.0:
        reg = geo.check_regular(network, concurrency_tol, angle_tol)
        res[3] = reg.max_concurrency_gap
        res[4] = reg.max_angle_residual
        for junction in network.topology.junctions:
            vel = [end_quantities(network.curve(ce.curve), ce.end)["velocity"] for ce in junction]
            gap = max(float(np.hypot(*(a - b))) for i, a in enumerate(vel) for b in vel[i + 1:])
            res[5] = max(res[5], gap)
        for ep in network.topology.endpoints:
            c = network.curve(ep.end.curve)
            q = end_quantities(c, ep.end.end)
            res[6] = max(res[6], float(np.hypot(*(q["point"] - np.asarray(ep.position)))))
            res[7] = max(res[7], float(np.hypot(*q["gamma_xx"])))
    tol = {1: 0.0, 2: 0.0, 3: concurrency_tol, 4: angle_tol, 5: compat_tol, 6: concurrency_tol, 7: compat_tol}
    return AdmissibilityReport(res, tol)


def _blend(x: np.ndarray, a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """theta(x) = x + a x^2 (1-x)^n / 2 + b (1-x)^2 x^n / 2 and its derivative.

    theta(0)=0, theta(1)=1, theta'=1 at both ends, theta''(0)=a, theta''(1)=b
    for every n >= 3; larger n localizes the correction near the ends.
    """
    u = 1.0 - x
    theta = x + 0.5 * a * x**2 * u**n + 0.5 * b * u**2 * x**n
    dtheta = (
        1.0
        + 0.5 * a * (2 * x * u**n - n * x**2 * u ** (n - 1))
        + 0.5 * b * (-2 * u * x**n + n * u**2 * x ** (n - 1))
    )
    return theta, dtheta


def reparametrization(a: float, b: float, max_degree: int = 60, min_degree: int = 5):
    """Smallest-degree monotone blend with the requested end second derivatives.

    Degrees from 5 on also keep the third derivative zero at the far end,
    which one-sided difference stencils at the curve ends notice.
    """
    probe = np.linspace(0.0, 1.0, 4001)
    for n in range(min_degree, max_degree + 1):
        _, dth = _blend(probe, a, b, n)
        if np.all(dth > 0):
            return n
    raise NonMonotoneReparam(f"no monotone blend up to degree {max_degree} for theta''=({a:.3g}, {b:.3g})")


def make_admissible(network: Network, geo_tol: float = 1e-2, angle_tol: float = 1e-3,
                    compat_tol: float = 1e-3, max_degree: int = 60, passes: int = 5) -> Network:
    """Reparametrize every open curve so the compatibility conditions hold.

    The required tangential velocity at a junction end is
    ``(k^{i-1} - k^{i+1}) / sqrt(3)`` (ends ordered anticlockwise) and zero at
    a fixed endpoint; the blend ``theta`` supplies it through
    ``theta_xx = (lambda_target - lambda_gamma) |gamma_x|``. The correction is
    repeated (up to ``passes`` times) because the discrete lambda and k only
    match their continuum values up to the grid error.
    """
    if check_admissible(network, compat_tol, angle_tol).passed:
        return network
    reg = geo.check_regular(network, angle_tol=geo_tol)
    if not reg.passed:
        raise NotGeometricallyAdmissible(
            f"network is not regular: concurrency gap {reg.max_concurrency_gap:.3e}, "
            f"angle residual {reg.max_angle_residual:.3e}"
        )
    current = network
    for _ in range(passes):
        current = _reparametrize_once(current, geo_tol, max_degree)
        if check_admissible(current, compat_tol, angle_tol).passed:
            break
    return current


def _end_targets(network: Network, geo_tol: float) -> dict[CurveEnd, float]:
    """Tangential velocity each curve end must have, in the curve's own orientation."""
    target: dict[CurveEnd, float] = {}
    for p, junction in enumerate(network.topology.junctions):
        ordered = geo.ordered_junction(network, junction)
        ks = [end_quantities(network.curve(ce.curve), ce.end)["k"] for ce in ordered]
        if abs(sum(ks)) > geo_tol:
            raise NotGeometricallyAdmissible(f"junction {p}: curvature sum {sum(ks):.3e} is not zero")
        for i, ce in enumerate(ordered):
            lam_ext = (ks[(i - 1) % 3] - ks[(i + 1) % 3]) / SQRT3
            target[ce] = geo.end_sign(ce.end) * lam_ext
    for r, ep in enumerate(network.topology.endpoints):
        k_end = end_quantities(network.curve(ep.end.curve), ep.end.end)["k"]
        if abs(k_end) > geo_tol:
            raise NotGeometricallyAdmissible(f"endpoint {r}: curvature {k_end:.3e} is not zero")
        target[ep.end] = 0.0
    return target


def _reparametrize_once(network: Network, geo_tol: float, max_degree: int) -> Network:
    target = _end_targets(network, geo_tol)
    curves = []
    for c in network.curves:
        if c.closed:
            curves.append(c)
            continue
        q = geo.quantities(c)
        a = (target[CurveEnd(c.id, START)] - q.lam[0]) * q.speed[0]
        b = (target[CurveEnd(c.id, FINISH)] - q.lam[-1]) * q.speed[-1]
        if a == 0.0 and b == 0.0:
            curves.append(c)
            continue
        n = reparametrization(a, b, max_degree)
        x = np.linspace(0.0, 1.0, c.N + 1)
        theta, _ = _blend(x, a, b, n)
        spline = CubicSpline(x, c.points, axis=0)
        pts = spline(theta)
        pts[0] = c.points[0]
        pts[-1] = c.points[-1]
        curves.append(c.with_points(pts))
    return network.with_curves(curves)


# ---------------------------------------------------------------------------
# The discrete step
# ---------------------------------------------------------------------------


class _Plan:
    """Topology compiled for fast repeated stepping."""

    def __init__(self, network: Network):
        self.ids = network.ids
        self.closed = [c.closed for c in network.curves]
        self.junction_of: dict[tuple[int, str], int] = {}
        self.fixed: dict[tuple[int, str], np.ndarray] = {}
        index = {cid: i for i, cid in enumerate(self.ids)}
        self.junction_ends: list[list[tuple[int, str]]] = []
        for p, junction in enumerate(network.topology.junctions):
            ends = []
            for ce in junction:
                key = (index[ce.curve], ce.end)
                self.junction_of[key] = p
                ends.append(key)
            self.junction_ends.append(ends)
        for ep in network.topology.endpoints:
            self.fixed[(index[ep.end.curve], ep.end.end)] = np.array(ep.position, dtype=float)
        self.topology = network.topology
        self.truncated = [c.truncated for c in network.curves]
        self.n_junctions = len(self.junction_ends)

    def network(self, points: Sequence[np.ndarray]) -> Network:
        curves = tuple(
            DiscreteCurve(p, cid, closed, trunc)
            for p, cid, closed, trunc in zip(points, self.ids, self.closed, self.truncated)
        )
        return Network(curves, self.topology)

    def junction_positions(self, points: Sequence[np.ndarray]) -> np.ndarray:
        X = np.zeros((self.n_junctions, 2))
        for p, ends in enumerate(self.junction_ends):
            i, end = ends[0]
            X[p] = points[i][0] if end == START else points[i][-1]
        return X


def _metric_coefficients(p: np.ndarray, dt: float, closed: bool) -> np.ndarray:
    if closed:
        d = np.roll(p, -1, axis=0) - np.roll(p, 1, axis=0)
    else:
        d = p[2:] - p[:-2]
    m = 0.25 * (d[:, 0] ** 2 + d[:, 1] ** 2)  # |gamma_x|^2 / N^2
    if np.any(m <= 0.0):
        raise DegenerateCurve("zero finite-difference tangent during step")
    return dt / m


def _solve_closed(p: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Cyclic tridiagonal solve by Sherman-Morrison."""
    n = p.shape[0]
    ab = np.empty((3, n))
    ab[0, 1:] = -c[:-1]
    ab[0, 0] = 0.0
    ab[1] = 1.0 + 2.0 * c
    ab[2, :-1] = -c[1:]
    ab[2, -1] = 0.0
    upper = -c[0]   # A[0, n-1]
    lower = -c[-1]  # A[n-1, 0]
    gam = -ab[1, 0]
    ab[1, 0] -= gam
    ab[1, -1] -= lower * upper / gam
    u = np.zeros(n)
    u[0] = gam
    u[-1] = lower
    rhs = np.column_stack([p, u])
    sol = solve_banded((1, 1), ab, rhs, overwrite_ab=True, overwrite_b=True, check_finite=False)
    y, z = sol[:, :2], sol[:, 2]
    vz = z[0] + upper / gam * z[-1]
    vy = y[0] + upper / gam * y[-1]
    return y - np.outer(z, vy) / (1.0 + vz)


def _advance(points: list[np.ndarray], plan: _Plan, dt: float, cfg: SolverConfig,
             X0: np.ndarray) -> list[np.ndarray]:
    """One semi-implicit step; returns new sample arrays."""
    P = plan.n_junctions
    affine = []  # per open curve: (u, w_start, w_finish) for interior nodes
    new_points: list[np.ndarray | None] = [None] * len(points)
    for i, p in enumerate(points):
        c = _metric_coefficients(p, dt, plan.closed[i])
        if plan.closed[i]:
            new_points[i] = _solve_closed(p, c)
            affine.append(None)
            continue
        m = c.shape[0]
        ab = np.empty((3, m))
        ab[0, 0] = 0.0
        ab[0, 1:] = -c[:-1]
        ab[1] = 1.0 + 2.0 * c
        ab[2, :-1] = -c[1:]
        ab[2, -1] = 0.0
        rhs = np.zeros((m, 4))
        rhs[:, :2] = p[1:-1]
        fs = plan.fixed.get((i, START))
        ff = plan.fixed.get((i, FINISH))
        if fs is not None:
            rhs[0, :2] += c[0] * fs
        else:
            rhs[0, 2] = c[0]
        if ff is not None:
            rhs[-1, :2] += c[-1] * ff
        else:
            rhs[-1, 3] = c[-1]
        sol = solve_banded((1, 1), ab, rhs, overwrite_ab=True, overwrite_b=True, check_finite=False)
        affine.append((sol[:, :2], sol[:, 2], sol[:, 3]))

    X = X0.copy()
    if P:
        X = _solve_junctions(points, plan, affine, X, cfg)

    for i, p in enumerate(points):
        if plan.closed[i]:
            continue
        u, ws, wf = affine[i]
        qs = plan.junction_of.get((i, START))
        qf = plan.junction_of.get((i, FINISH))
        start = X[qs] if qs is not None else plan.fixed[(i, START)]
        finish = X[qf] if qf is not None else plan.fixed[(i, FINISH)]
        interior = u.copy()
        if qs is not None:
            interior += np.outer(ws, X[qs])
        if qf is not None:
            interior += np.outer(wf, X[qf])
        new = np.empty_like(p)
        new[0] = start
        new[-1] = finish
        new[1:-1] = interior
        new_points[i] = new
    return new_points


def _node_affine(plan: _Plan, affine, i: int, j: int, n_nodes: int):
    """Node j of open curve i as (constant, {junction: coefficient})."""
    if j == 0 or j == n_nodes - 1:
        end = START if j == 0 else FINISH
        q = plan.junction_of.get((i, end))
        if q is None:
            return plan.fixed[(i, end)], {}
        return np.zeros(2), {q: 1.0}
    u, ws, wf = affine[i]
    coef: dict[int, float] = {}
    qs = plan.junction_of.get((i, START))
    qf = plan.junction_of.get((i, FINISH))
    if qs is not None:
        coef[qs] = coef.get(qs, 0.0) + ws[j - 1]
    if qf is not None:
        coef[qf] = coef.get(qf, 0.0) + wf[j - 1]
    return u[j - 1], coef


def _solve_junctions(points, plan: _Plan, affine, X: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    P = plan.n_junctions
    # v_e(X) = const_e + sum_q a_eq X_q for the unnormalized exterior tangent
    terms = []
    for p, ends in enumerate(plan.junction_ends):
        for i, end in ends:
            n_nodes = points[i].shape[0]
            # same one-sided stencil as geometry.point_derivatives
            self_w, weights = (-25.0, (48.0, -36.0, 16.0, -3.0)) if n_nodes >= 6 else (-3.0, (4.0, -1.0))
            const = np.zeros(2)
            coef = np.zeros(P)
            coef[p] += self_w
            for off, w in enumerate(weights, start=1):
                j = off if end == START else n_nodes - 1 - off
                c, a = _node_affine(plan, affine, i, j, n_nodes)
                const = const + w * c
                for q, v in a.items():
                    coef[q] += w * v
            terms.append((p, const, coef))
    for _ in range(cfg.max_newton_iters + 1):
        F = np.zeros((P, 2))
        J = np.zeros((P, 2, P, 2))
        for p, const, coef in terms:
            v = const + coef @ X
            nv = math.hypot(v[0], v[1])
            if nv == 0.0 or not math.isfinite(nv):
                raise NewtonDivergence(f"junction {p}: degenerate discrete tangent")
            u = v / nv
            F[p] += u
            proj = (np.eye(2) - np.outer(u, u)) / nv
            J[p] += proj[:, None, :] * coef[None, :, None]
        err = float(np.max(np.hypot(F[:, 0], F[:, 1])))
        if err < cfg.newton_tol:
            return X
        try:
            delta = np.linalg.solve(J.reshape(2 * P, 2 * P), -F.reshape(2 * P))
        except np.linalg.LinAlgError as exc:
            raise NewtonDivergence(f"singular junction Jacobian: {exc}") from None
        X = X + delta.reshape(P, 2)
        if not np.all(np.isfinite(X)):
            break
    raise NewtonDivergence(f"junction solve did not reach tolerance {cfg.newton_tol:g} (residual {err:.3e})")


def _maybe_resample(points: list[np.ndarray], plan: _Plan, threshold: float) -> bool:
    changed = False
    for i, p in enumerate(points):
        seg = np.roll(p, -1, axis=0) - p if plan.closed[i] else np.diff(p, axis=0)
        lens = np.hypot(seg[:, 0], seg[:, 1])
        if lens.max() > threshold * lens.min():
            c = DiscreteCurve(p, plan.ids[i], plan.closed[i])
            points[i] = np.array(geo.resample_arclength(c).points)
            changed = True
    return changed


def _monitor(points: list[np.ndarray], plan: _Plan) -> tuple[np.ndarray, np.ndarray]:
    """Per-curve length and sup |k|."""
    lengths = np.empty(len(points))
    supk = np.empty(len(points))
    for i, p in enumerate(points):
        closed = plan.closed[i]
        seg = np.roll(p, -1, axis=0) - p if closed else np.diff(p, axis=0)
        lengths[i] = np.hypot(seg[:, 0], seg[:, 1]).sum()
        d1, d2 = geo.point_derivatives(p, closed)
        cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        sp = np.hypot(d1[:, 0], d1[:, 1])
        supk[i] = np.max(np.abs(cross) / sp**3)
    return lengths, supk


def _advance_guarded(points, plan, dt, cfg, X):
    """Advance by dt, halving internally on Newton failure when enabled."""
    if not cfg.halve_on_divergence:
        return _advance(points, plan, dt, cfg, X)
    pieces = 1
    for _ in range(cfg.max_halvings + 1):
        try:
            cur = points
            for _ in range(pieces):
                cur = _advance(cur, plan, dt / pieces, cfg, plan.junction_positions(cur))
            return cur
        except NewtonDivergence:
            pieces *= 2
            logger.info("Newton divergence; retrying with %d substeps", pieces)
    raise NewtonDivergence(f"junction solve failed after {cfg.max_halvings} halvings")


def step(state: FlowState, config: SolverConfig | None = None) -> FlowState:
    """Advance a flow state by one time step of size ``state.dt``."""
    cfg = config or SolverConfig(dt=state.dt)
    plan = _Plan(state.network)
    points = [np.array(c.points) for c in state.network.curves]
    new = _advance_guarded(points, plan, state.dt, cfg, plan.junction_positions(points))
    _maybe_resample(new, plan, cfg.resample_threshold)
    lengths, supk = _monitor(new, plan)
    out = FlowState(state.t + state.dt, plan.network(new), state.dt, state.step_count + 1)
    if lengths.min() < cfg.L_min or supk.max() > cfg.K_max:
        raise SingularityDetected(
            f"t={out.t:.6g}: min length {lengths.min():.3e}, sup|k| {supk.max():.3e}", record=out
        )
    return out


# ---------------------------------------------------------------------------
# Evolution with recording
# ---------------------------------------------------------------------------


def diagnostics_row(t: float, network: Network, loops: Sequence[Loop]) -> dict:
    from .diagnostics import curvature_seminorms

    qs = {c.id: geo.quantities(c) for c in network.curves}
    semi = curvature_seminorms(network, qs)
    lengths = [geo.length(c) for c in network.curves]
    supk = [float(np.max(np.abs(qs[cid].k))) for cid in network.ids]
    row = {
        "t": t,
        "L_total": float(sum(lengths)),
        "int_k2": semi.int_k2,
        "int_ks2": semi.int_ks2,
        "min_len": float(min(lengths)),
        "sup_k": float(max(supk)),
    }
    for lp in loops:
        try:
            row[f"area_{lp.name}"] = geo.enclosed_area(lp, network)
        except Exception:  # a collapsed loop no longer closes
            row[f"area_{lp.name}"] = float("nan")
    row["_lengths"] = dict(zip(network.ids, lengths))
    row["_supk"] = dict(zip(network.ids, supk))
    return row


def classify_singularity(first: dict, last: dict, cfg: SolverConfig) -> tuple[str, tuple, tuple]:
    """Length-collapse / curvature-blow-up dichotomy from two diagnostic rows."""
    len0 = first["_lengths"]
    lens = last["_lengths"]
    collapsing = tuple(
        cid for cid, L in lens.items() if L < cfg.L_min or L <= cfg.collapse_ratio * len0[cid]
    )
    ref = max(first["sup_k"], 1.0 / max(first["min_len"], 1e-300))
    blowing = tuple(
        cid for cid, k in last["_supk"].items() if k > cfg.K_max or k >= cfg.blowup_ratio * ref
    )
    if collapsing and blowing:
        kind = "both"
    elif collapsing:
        kind = "length-collapse"
    elif blowing:
        kind = "curvature-blow-up"
    else:
        kind = "none"
    return kind, collapsing, blowing


def evolve(state: FlowState, config: SolverConfig, t_max: float, loops: Sequence[Loop] | None = None) -> Trajectory:
    """Step until ``t_max`` or until the singularity monitor fires."""
    cfg = config
    plan = _Plan(state.network)
    if loops is None:
        loops = geo.find_loops(state.network)
    loops = list(loops)
    points = [np.array(c.points) for c in state.network.curves]
    t0 = state.t
    dt = state.dt
    traj = Trajectory([(t0, state.network)], [diagnostics_row(t0, state.network, loops)], loops, config=cfg)
    n = state.step_count
    steps_here = 0
    t = t0
    last_recorded = n
    reason = "max-time"
    eps = 1e-12 * max(1.0, abs(t_max))
    while t < t_max - eps:
        h = min(dt, t_max - t)
        points = _advance_guarded(points, plan, h, cfg, plan.junction_positions(points))
        _maybe_resample(points, plan, cfg.resample_threshold)
        n += 1
        steps_here += 1
        t = t0 + steps_here * dt if h == dt else t_max
        lengths, supk = _monitor(points, plan)
        singular = lengths.min() < cfg.L_min or supk.max() > cfg.K_max
        if singular or (n - last_recorded) % cfg.record_every == 0 or t >= t_max - eps:
            net = plan.network(points)
            traj.snapshots.append((t, net))
            traj.diagnostics.append(diagnostics_row(t, net, loops))
            last_recorded = n
        if singular:
            reason = "singularity"
            break
    first, last = traj.diagnostics[0], traj.diagnostics[-1]
    if reason == "singularity":
        kind, collapsing, blowing = classify_singularity(first, last, cfg)
    else:
        kind, collapsing, blowing = "none", (), ()
    traj.termination = Termination(
        reason=reason,
        t=t,
        classification=kind,
        collapsing_curves=collapsing,
        blowup_curves=blowing,
        values={"min_len": last["min_len"], "sup_k": last["sup_k"], "int_k2": last["int_k2"], "steps": n},
    )
    logger.info("evolve stopped at t=%.6g (%s, %s) after %d steps", t, reason, kind, steps_here)
    return traj
