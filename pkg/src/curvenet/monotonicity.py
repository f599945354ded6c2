"""Gaussian densities, parabolic rescaling and monotonicity audits.

The backward heat kernel is the one-dimensional Gaussian
``rho = exp(-|x - x0|^2 / (4 (t0 - t))) / sqrt(4 pi (t0 - t))`` and the
density of a network is its rho-weighted length. Under the rescaling
``(x - x0) / sqrt(2 (t0 - t))`` the weighted length element becomes
``exp(-|y|^2 / 2) / sqrt(2 pi)`` times rescaled arclength, so both sides are
computed with the same trapezoid rule and agree to rounding.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .errors import BadTimeOrder, InsufficientTail
from .geometry import Network

# Gaussian weights are dropped beyond this many rescaled units (tail < e^-32)
TRUNCATION_RADIUS = 8.0


def _time_gap(t0: float, t: float) -> float:
    gap = t0 - t
    if not gap > 0:
        raise BadTimeOrder(f"evaluation time {t} must precede t0 = {t0}")
    return gap


def backward_heat_kernel(t0: float, x0, t: float, x) -> np.ndarray | float:
    gap = _time_gap(t0, t)
    d = np.asarray(x, dtype=float) - np.asarray(x0, dtype=float)
    r2 = np.sum(d * d, axis=-1)
    val = np.exp(-r2 / (4.0 * gap)) / math.sqrt(4.0 * math.pi * gap)
    return float(val) if np.ndim(val) == 0 else val


def _gaussian_weights(y: np.ndarray, truncate: float | None) -> np.ndarray:
    """exp(-|y|^2/2)/sqrt(2 pi) on rescaled points, zero beyond ``truncate``."""
    r2 = np.sum(y * y, axis=-1)
    w = np.exp(-0.5 * r2) / math.sqrt(2.0 * math.pi)
    if truncate is not None:
        w[r2 > truncate * truncate] = 0.0
    return w


def _weighted_length(network: Network, center: np.ndarray, scale: float, truncate: float | None) -> float:
    total = 0.0
    for c in network.curves:
        y = (c.points - center) / scale
        w = _gaussian_weights(y, truncate)
        seg = np.diff(y, axis=0) if not c.closed else np.roll(y, -1, axis=0) - y
        lens = np.hypot(seg[:, 0], seg[:, 1])
        if c.closed:
            total += float(np.sum(0.5 * (w + np.roll(w, -1)) * lens))
        else:
            total += float(np.sum(0.5 * (w[1:] + w[:-1]) * lens))
    return total


def gaussian_density(network: Network, t0: float, x0, t: float, truncate: float | None = TRUNCATION_RADIUS) -> float:
    """Theta_{t0, x0}(t): trapezoid quadrature of the backward heat kernel."""
    gap = _time_gap(t0, t)
    return _weighted_length(network, np.asarray(x0, dtype=float), math.sqrt(2.0 * gap), truncate)


@dataclass(frozen=True, eq=False)
class RescaledNetwork:
    network: Network
    rescaled_time: float
    x0: tuple[float, float]
    scale: float
    source_time: float


def huisken_rescale(network: Network, t: float, x0, T: float) -> RescaledNetwork:
    """Map a snapshot at time t to ``(N_t - x0) / sqrt(2 (T - t))``."""
    gap = _time_gap(T, t)
    scale = math.sqrt(2.0 * gap)
    c = np.asarray(x0, dtype=float)
    return RescaledNetwork(
        network.map_points(lambda p: (p - c) / scale),
        -0.5 * math.log(gap),
        (float(c[0]), float(c[1])),
        scale,
        t,
    )


def _as_network(rescaled) -> Network:
    return rescaled.network if isinstance(rescaled, RescaledNetwork) else rescaled


def rescaled_density(rescaled, truncate: float | None = TRUNCATION_RADIUS) -> float:
    """(1/sqrt(2 pi)) int exp(-|x|^2/2) ds over a rescaled network (or a plain one)."""
    return _weighted_length(_as_network(rescaled), np.zeros(2), 1.0, truncate)


@dataclass(frozen=True)
class RescaledShrinkerResidual:
    sup: float
    weighted_l2: float


def rescaled_shrinker_residual(rescaled) -> RescaledShrinkerResidual:
    """Sup and Gaussian-weighted L2 norms of ``|k + <x, nu> nu|`` in rescaled coordinates."""
    from .selfsimilar import shrinker_residual

    net = _as_network(rescaled)
    res = shrinker_residual(net)
    total = 0.0
    for c in net.curves:
        r = res.per_curve[c.id].pointwise
        total += geo.integrate(c, r**2 * _gaussian_weights(c.points, None))
    return RescaledShrinkerResidual(res.sup, math.sqrt(total))


def _clipped_length(points: np.ndarray, closed: bool, center: np.ndarray, radius: float) -> float:
    a = points
    b = np.roll(points, -1, axis=0) if closed else points[1:]
    if not closed:
        a = points[:-1]
    d = b - a
    f = a - center
    A = np.sum(d * d, axis=1)
    B = 2.0 * np.sum(f * d, axis=1)
    C = np.sum(f * f, axis=1) - radius * radius
    disc = B * B - 4.0 * A * C
    ok = (disc > 0) & (A > 0)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        s0 = np.clip((-B - sq) / (2.0 * A), 0.0, 1.0)
        s1 = np.clip((-B + sq) / (2.0 * A), 0.0, 1.0)
    inside = np.where(ok, s1 - s0, 0.0)
    return float(np.sum(inside * np.sqrt(A)))


def length_ratio_check(rescaled, centers, radii) -> tuple[float, np.ndarray]:
    """Length of the network inside each ball divided by its radius.

    Returns the maximum ratio and the full (centers x radii) table.
    """
    net = _as_network(rescaled)
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    table = np.zeros((len(centers), len(radii)))
    for i, c in enumerate(centers):
        for j, R in enumerate(radii):
            clipped = sum(_clipped_length(cv.points, cv.closed, c, R) for cv in net.curves)
            table[i, j] = clipped / R
    return float(table.max()), table


# ---------------------------------------------------------------------------
# Audits along trajectories
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LimitDensity:
    value: float
    times: np.ndarray
    series: np.ndarray
    monotone: bool


def limit_density(trajectory, x0, T: float, K: int = 10, truncate: float | None = TRUNCATION_RADIUS) -> LimitDensity:
    """Extrapolate Theta_{T, x0}(t) to t = T from the last K samples.

    The extrapolation is a least-squares line in T - t, whose intercept is
    the estimate.
    """
    times, series = [], []
    for t, net in trajectory.snapshots:
        if t < T:
            times.append(t)
            series.append(gaussian_density(net, T, x0, t, truncate))
    if len(times) < K:
        raise InsufficientTail(f"need {K} snapshots before T = {T}, have {len(times)}")
    times = np.array(times[-K:])
    series = np.array(series[-K:])
    slope, intercept = np.polyfit(T - times, series, 1)
    monotone = bool(np.all(np.diff(series) <= 1e-12 * max(1.0, abs(series).max())))
    return LimitDensity(float(intercept), times, series, monotone)


def _endpoint_terms(network: Network, t0: float, x0: np.ndarray, t: float) -> float:
    """Sum over fixed endpoints of <(P - x0)/(2 (t0 - t)), tau_in(P)> rho(P).

    ``tau_in`` is the unit tangent arriving at P; fixed endpoints do not move,
    so the tangential-velocity part of the boundary term vanishes.
    """
    gap = t0 - t
    total = 0.0
    for ep in network.topology.endpoints:
        c = network.curve(ep.end.curve)
        P = np.asarray(ep.position, dtype=float)
        tau_in = -geo.exterior_tangent(c, ep.end.end)
        total += float(np.dot(P - x0, tau_in)) / (2.0 * gap) * backward_heat_kernel(t0, x0, t, P)
    return total


def dissipation(network: Network, t0: float, x0, t: float, truncate: float | None = TRUNCATION_RADIUS) -> float:
    """int |k_vec + <x - x0, nu> nu / (2 (t0 - t))|^2 rho ds."""
    gap = _time_gap(t0, t)
    c0 = np.asarray(x0, dtype=float)
    total = 0.0
    for c in network.curves:
        q = geo.quantities(c)
        rel = c.points - c0
        vec = q.k_vec + (np.einsum("ij,ij->i", rel, q.nu) / (2.0 * gap))[:, None] * q.nu
        w = _gaussian_weights(rel / math.sqrt(2.0 * gap), truncate) / math.sqrt(2.0 * gap)
        total += geo.integrate(c, np.sum(vec * vec, axis=1) * w)
    return total


@dataclass(frozen=True, eq=False)
class MonotonicityAudit:
    t: np.ndarray
    theta: np.ndarray
    dtheta: np.ndarray
    dissipation: np.ndarray
    boundary: np.ndarray

    @property
    def residual(self) -> np.ndarray:
        """dTheta/dt + dissipation - boundary terms; zero for the exact flow."""
        return self.dtheta + self.dissipation - self.boundary

    @property
    def max_increment(self) -> float:
        return float(np.max(np.diff(self.theta))) if len(self.theta) > 1 else 0.0

    columns = ("t", "theta", "dtheta", "dissipation", "boundary", "residual")

    def rows(self):
        return zip(self.t, self.theta, self.dtheta, self.dissipation, self.boundary, self.residual)


def monotonicity_audit(trajectory, t0: float, x0, truncate: float | None = TRUNCATION_RADIUS) -> MonotonicityAudit:
    """Theta series with its derivative, dissipation and endpoint terms."""
    c0 = np.asarray(x0, dtype=float)
    rows = [(t, net) for t, net in trajectory.snapshots if t < t0]
    if not rows:
        raise BadTimeOrder(f"no snapshot precedes t0 = {t0}")
    t = np.array([r[0] for r in rows])
    theta = np.array([gaussian_density(net, t0, c0, tt, truncate) for tt, net in rows])
    diss = np.array([dissipation(net, t0, c0, tt, truncate) for tt, net in rows])
    bnd = np.array([_endpoint_terms(net, t0, c0, tt) for tt, net in rows])
    if len(t) > 2:
        dtheta = np.gradient(theta, t, edge_order=2)
    elif len(t) == 2:
        dtheta = np.gradient(theta, t)
    else:
        dtheta = np.zeros(1)
    return MonotonicityAudit(t, theta, dtheta, diss, bnd)


def density_map(network: Network, t0: float, t: float, xs, ys, workers: int = 4,
                truncate: float | None = TRUNCATION_RADIUS) -> np.ndarray:
    """Theta_{t0, x0}(t) on a grid of centers, rows ``(x, y, value)``."""
    grid = [(float(x), float(y)) for y in ys for x in xs]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        values = list(pool.map(lambda c: gaussian_density(network, t0, c, t, truncate), grid))
    return np.array([(x, y, v) for (x, y), v in zip(grid, values)])
