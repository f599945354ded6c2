"""Self-similar solutions: translators, rotators and shrinkers.

Shrinkers satisfy ``k + <eta, nu> = 0`` with ``eta`` the position vector.
Writing the unit tangent as ``(cos theta, sin theta)`` this becomes the
shooting system ``x' = cos theta, y' = sin theta, theta' = x sin theta - y cos theta``
in arclength, integrated here with classical fixed-step RK4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import geometry as geo
from .errors import NoClosureInWindow, RangeOutOfDomain, ShootingFailed
from .geometry import FINISH, START, CurveEnd, DiscreteCurve, Endpoint, Network, NetworkTopology

HALFLINE_RADIUS = 8.0


# ---------------------------------------------------------------------------
# Residual checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ResidualNorms:
    pointwise: np.ndarray
    sup: float
    l2: float


def _norms(curve: DiscreteCurve, values: np.ndarray) -> ResidualNorms:
    values = np.abs(values)
    return ResidualNorms(values, float(values.max()), math.sqrt(geo.integrate(curve, values**2)))


def grim_reaper(y_range: tuple[float, float] = (-1.4, 1.4), N: int = 400, curve_id: str = "grim_reaper") -> DiscreteCurve:
    """Samples of the translating graph ``x = -log cos y``, oriented with y increasing."""
    lo, hi = y_range
    if not (-math.pi / 2 < lo < hi < math.pi / 2):
        raise RangeOutOfDomain(f"y range {y_range} must lie inside (-pi/2, pi/2)")
    y = np.linspace(lo, hi, N + 1)
    return DiscreteCurve(np.column_stack([-np.log(np.cos(y)), y]), curve_id)


def grim_reaper_frame(y: np.ndarray):
    """Exact unit tangent, normal and curvature of the grim reaper at height y."""
    y = np.asarray(y, dtype=float)
    tau = np.column_stack([np.sin(y), np.cos(y)])
    return tau, geo.rotate90(tau), -np.cos(y)


def translator_residual(curve: DiscreteCurve, v=(1.0, 0.0)) -> ResidualNorms:
    q = geo.quantities(curve)
    return _norms(curve, q.k - q.nu @ np.asarray(v, dtype=float))


def rotator_residual(curve: DiscreteCurve, omega: float) -> ResidualNorms:
    q = geo.quantities(curve)
    radial = np.einsum("ij,ij->i", curve.points, q.tau)
    return _norms(curve, q.k - omega * radial)


def fit_rotation_speed(curve: DiscreteCurve) -> float:
    """Least-squares omega for ``k = omega <eta, tau>`` over the curve."""
    q = geo.quantities(curve)
    radial = np.einsum("ij,ij->i", curve.points, q.tau)
    denom = geo.integrate(curve, radial**2)
    if denom == 0.0:
        return 0.0
    return geo.integrate(curve, q.k * radial) / denom


@dataclass(frozen=True, eq=False)
class ShrinkerResidual:
    per_curve: dict
    sup: float
    l2: float


def shrinker_residual(network: Network) -> ShrinkerResidual:
    """Pointwise ``|k_vec + <eta, nu> nu|`` on every curve, with sup and L2 norms."""
    per = {}
    total = 0.0
    for c in network.curves:
        q = geo.quantities(c)
        normal_pos = np.einsum("ij,ij->i", c.points, q.nu)
        vec = q.k_vec + normal_pos[:, None] * q.nu
        per[c.id] = _norms(c, np.hypot(vec[:, 0], vec[:, 1]))
        total += per[c.id].l2**2
    sup = max(r.sup for r in per.values())
    return ShrinkerResidual(per, sup, math.sqrt(total))


# ---------------------------------------------------------------------------
# Shooting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShooterState:
    x: float
    y: float
    theta: float
    s: float = 0.0

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    @property
    def tangent(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    def mirrored(self) -> "ShooterState":
        """Reflection across the x-axis."""
        return ShooterState(self.x, -self.y, -self.theta, self.s)


def _rhs(x: float, y: float, th: float):
    c, s = math.cos(th), math.sin(th)
    return c, s, x * s - y * c


def _rk4(x: float, y: float, th: float, h: float):
    a1, b1, c1 = _rhs(x, y, th)
    a2, b2, c2 = _rhs(x + 0.5 * h * a1, y + 0.5 * h * b1, th + 0.5 * h * c1)
    a3, b3, c3 = _rhs(x + 0.5 * h * a2, y + 0.5 * h * b2, th + 0.5 * h * c2)
    a4, b4, c4 = _rhs(x + h * a3, y + h * b3, th + h * c3)
    return (
        x + h * (a1 + 2 * a2 + 2 * a3 + a4) / 6.0,
        y + h * (b1 + 2 * b2 + 2 * b3 + b4) / 6.0,
        th + h * (c1 + 2 * c2 + 2 * c3 + c4) / 6.0,
    )


def shrinker_ode_step(state: ShooterState, ds: float) -> ShooterState:
    """One RK4 step of the shrinker shooting system."""
    if not ds > 0:
        raise ValueError("ds must be positive")
    x, y, th = _rk4(state.x, state.y, state.theta, ds)
    return ShooterState(x, y, th, state.s + ds)


Event = Callable[[float, float, float], float]


def shoot(state: ShooterState, ds: float, event: Event, max_length: float = 50.0) -> ShooterState:
    """Integrate until ``event`` changes sign from its value after the first step.

    The crossing is located by a secant iteration on the size of the last step.
    """
    x, y, th = state.x, state.y, state.theta
    x, y, th = _rk4(x, y, th, ds)
    g_prev = event(x, y, th)
    n = 1
    max_steps = int(max_length / ds)
    while n < max_steps:
        nx, ny, nth = _rk4(x, y, th, ds)
        g = event(nx, ny, nth)
        if g == 0.0 or (g > 0) != (g_prev > 0):
            h0, g0, h1, g1 = 0.0, g_prev, ds, g
            for _ in range(60):
                hm = h1 - g1 * (h1 - h0) / (g1 - g0)
                if not (min(h0, h1) <= hm <= max(h0, h1)):
                    hm = 0.5 * (h0 + h1)
                gm = event(*_rk4(x, y, th, hm))
                if abs(gm) < 1e-15 or abs(h1 - h0) < 1e-16:
                    break
                if (gm > 0) == (g0 > 0):
                    h0, g0 = hm, gm
                else:
                    h1, g1 = hm, gm
            ex, ey, eth = _rk4(x, y, th, hm)
            return ShooterState(ex, ey, eth, state.s + n * ds + hm)
        x, y, th, g_prev = nx, ny, nth, g
        n += 1
    raise ShootingFailed(f"no event within arclength {max_length}")


def _radial_speed(x, y, th):
    return x * math.cos(th) + y * math.sin(th)


def _crosses_axis(x, y, th):
    return y


def _bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10, max_iter: int = 200) -> float:
    flo = f(lo)
    fhi = f(hi)
    if (flo > 0) == (fhi > 0):
        raise ShootingFailed(f"closing condition not bracketed on [{lo}, {hi}] ({flo:.3g}, {fhi:.3g})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) < tol or hi - lo < 1e-15:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bracket(f: Callable[[float], float], lo: float, hi: float, limits: tuple[float, float], grow: float = 1.5):
    """Widen [lo, hi] inside ``limits`` until f changes sign."""
    for _ in range(40):
        try:
            if (f(lo) > 0) != (f(hi) > 0):
                return lo, hi
        except ShootingFailed:
            pass
        width = (hi - lo) * grow
        lo = max(limits[0], lo - width / 2)
        hi = min(limits[1], hi + width / 2)
    raise ShootingFailed(f"could not bracket the closing condition within {limits}")


def uniform_orbit(state: ShooterState, total: float, spacing: float, ds: float) -> np.ndarray:
    """Samples at equal arclength ``total / n`` along the orbit through ``state``.

    The RK4 step is the largest divisor of each sample interval not above
    ``ds``, so the last sample lands exactly at arclength ``total``.
    """
    n = max(2, int(math.ceil(total / spacing)))
    sub = max(1, int(math.ceil(total / n / ds)))
    h = total / (n * sub)
    x, y, th = state.x, state.y, state.theta
    out = np.empty((n + 1, 3))
    out[0] = (x, y, th)
    for i in range(1, n + 1):
        for _ in range(sub):
            x, y, th = _rk4(x, y, th, h)
        out[i] = (x, y, th)
    return out


# ---------------------------------------------------------------------------
# Abresch-Langer curves
# ---------------------------------------------------------------------------


def half_period_angle(r0: float, ds: float = 1e-3) -> tuple[float, ShooterState]:
    """Polar angle swept from an extremum of |x| at (r0, 0) to the next one."""
    end = shoot(ShooterState(r0, 0.0, math.pi / 2), ds, _radial_speed)
    return math.atan2(end.y, end.x) % (2 * math.pi), end


@dataclass(frozen=True, eq=False)
class AbreschLangerResult:
    r0: float
    petals: int
    windings: int
    curve: DiscreteCurve
    closure_residual: float
    half_period_length: float
    half_period_angle: float


def find_abresch_langer(r0: float, ds: float = 1e-3, max_petals: int = 16, window: float = 0.1,
                        spacing: float = 5e-3) -> AbreschLangerResult:
    """Closed shrinker near the orbit through (r0, 0) perpendicular to the axis.

    A closed curve with ``p`` petals winding ``q`` times needs the half-period
    polar angle to equal ``pi q / p``. The rational closest to the angle at r0
    with ``p <= max_petals`` inside the window ``r0 (1 +- window)`` is chosen
    and r0 is bisected onto it.
    """
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    if r0 == 1.0:
        n = max(16, int(round(2 * math.pi / spacing)))
        c = geo.circle_curve(1.0, n, curve_id="abresch_langer", phase=0.0)
        return AbreschLangerResult(1.0, 1, 1, c, 0.0, 2 * math.pi, 2 * math.pi)
    lo, hi = r0 * (1 - window), r0 * (1 + window)
    # stay on one side of the circle orbit
    if r0 < 1:
        hi = min(hi, 1 - 1e-6)
    else:
        lo = max(lo, 1 + 1e-6)
    ratio = lambda r: half_period_angle(r, ds)[0] / math.pi
    r_lo, r_hi, r_mid = ratio(lo), ratio(hi), ratio(r0)
    a, b = sorted((r_lo, r_hi))
    candidates = []
    for p in range(2, max_petals + 1):
        for q in range(p // 2 + 1, p):
            f = Fraction(q, p)
            if f.denominator == p and a < q / p < b and q / p < 1 / math.sqrt(2):
                candidates.append(f)
    if not candidates:
        raise NoClosureInWindow(
            f"half-period angle/pi spans [{a:.6f}, {b:.6f}] on r0 in [{lo:.4g}, {hi:.4g}]; "
            f"no q/p with p <= {max_petals}"
        )
    target = min(candidates, key=lambda f: (abs(float(f) - r_mid), f.denominator))
    r_star = _bisect(lambda r: ratio(r) - float(target), lo, hi, tol=1e-13)
    alpha, end = half_period_angle(r_star, ds)
    p, q = target.denominator, target.numerator
    # samples per half period times RK4 substeps fit the half period exactly
    per_half = max(2, int(math.ceil(end.s / spacing)))
    sub = max(1, int(math.ceil(end.s / per_half / ds)))
    h = end.s / (per_half * sub)
    x, y, th = r_star, 0.0, math.pi / 2
    n_samples = 2 * p * per_half
    pts = np.empty((n_samples + 1, 3))
    pts[0] = (x, y, th)
    for i in range(1, n_samples + 1):
        for _ in range(sub):
            x, y, th = _rk4(x, y, th, h)
        pts[i] = (x, y, th)
    closure = float(np.hypot(*(pts[-1, :2] - pts[0, :2])))
    samples = pts[:-1, :2]
    curve = DiscreteCurve(samples, "abresch_langer", closed=True)
    return AbreschLangerResult(r_star, p, q, curve, closure, end.s, alpha)


# ---------------------------------------------------------------------------
# Networks with triple junctions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ShrinkerCatalogEntry:
    kind: str
    network: Network
    parameters: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    density: float = math.nan

    def metadata(self) -> dict:
        return {"kind": self.kind, "parameters": self.parameters, "residuals": self.residuals, "density": self.density}


def _ray(a, b, n: int, curve_id: str, truncated: bool = True) -> DiscreteCurve:
    c = geo.segment_curve(a, b, n, curve_id)
    return DiscreteCurve(c.points, curve_id, truncated=truncated)


def _ray_samples(start: np.ndarray, direction: np.ndarray, spacing: float) -> int:
    span = HALFLINE_RADIUS - float(np.dot(start, direction))
    return max(4, int(math.ceil(span / spacing)))


def standard_triod(scale: float = HALFLINE_RADIUS, n: int = 80, rotation: float = 0.0,
                   center=(0.0, 0.0)) -> Network:
    """Three rays of length ``scale`` meeting at 120 degrees, far ends pinned."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    c0 = np.asarray(center, dtype=float)
    curves = []
    endpoints = []
    for i in range(3):
        ang = rotation + 2 * math.pi * i / 3
        tip = c0 + scale * np.array([math.cos(ang), math.sin(ang)])
        cid = f"leg{i}"
        curves.append(_ray(c0, tip, n, cid))
        endpoints.append(Endpoint(CurveEnd(cid, FINISH), tuple(curves[-1].finish)))
    junction = tuple(CurveEnd(f"leg{i}", START) for i in range(3))
    return Network(tuple(curves), NetworkTopology((junction,), tuple(endpoints)))


def circle_shrinker(n: int = 400) -> Network:
    return geo.closed_network(geo.circle_curve(1.0, n, curve_id="circle"))


def _density(network: Network) -> float:
    from .monotonicity import rescaled_density

    return rescaled_density(network)


def _validate(kind: str, network: Network, params: dict) -> ShrinkerCatalogEntry:
    reg = geo.check_regular(network)
    res = shrinker_residual(network)
    residuals = {
        "angle": reg.max_angle_residual,
        "concurrency": reg.max_concurrency_gap,
        "shrinker_sup": res.sup,
        "shrinker_l2": res.l2,
    }
    return ShrinkerCatalogEntry(kind, network, params, residuals, _density(network))


def find_brakke_spoon(ds: float = 1e-3, spacing: float = 1e-3, tol: float = 1e-10,
                      leg_spacing: float = 0.02) -> ShrinkerCatalogEntry:
    """Loop plus halfline shrinker, symmetric about the x-axis.

    The junction sits at (q, 0) with q < 0 and the halfline runs along the
    negative x-axis. The upper branch of the loop leaves the junction at +60
    degrees; q is bisected until the branch meets the x-axis perpendicularly,
    and the lower branch is its mirror image.
    """

    def closing(q: float) -> float:
        end = shoot(ShooterState(q, 0.0, math.pi / 3), ds, _crosses_axis)
        return math.remainder(end.theta + math.pi / 2, 2 * math.pi)

    lo, hi = _bracket(closing, -1.2, -0.8, (-3.0, -1e-3))
    q = _bisect(closing, lo, hi, tol)
    start = ShooterState(q, 0.0, math.pi / 3)
    end = shoot(start, ds, _crosses_axis)
    upper = uniform_orbit(start, end.s, spacing, ds)[:, :2]
    upper[-1, 1] = 0.0
    lower = upper[::-1].copy()
    lower[:, 1] *= -1
    loop_pts = np.vstack([upper, lower[1:]])
    loop_pts[-1] = loop_pts[0]
    junction = loop_pts[0].copy()
    loop = DiscreteCurve(loop_pts, "loop")
    n_leg = _ray_samples(junction, np.array([-1.0, 0.0]), leg_spacing)
    leg = _ray(junction, (-HALFLINE_RADIUS, 0.0), n_leg, "leg")
    topo = NetworkTopology(
        ((CurveEnd("loop", START), CurveEnd("loop", FINISH), CurveEnd("leg", START)),),
        (Endpoint(CurveEnd("leg", FINISH), tuple(leg.finish)),),
    )
    net = Network((loop, leg), topo)
    params = {"junction_x": q, "crossing_x": end.x, "closing_residual": abs(closing(q)), "ds": ds}
    return _validate("spoon", net, params)


def find_lens(ds: float = 1e-3, spacing: float = 1e-3, tol: float = 1e-10,
              leg_spacing: float = 0.02) -> ShrinkerCatalogEntry:
    """Two-arc shrinker with halflines on the x-axis, symmetric about both axes.

    A quarter arc starts on the y-axis at height h moving horizontally; h is
    bisected until the arc reaches the x-axis at -60 degrees, which makes the
    two arcs and the outgoing halfline meet at 120 degrees.
    """

    def closing(h: float) -> float:
        end = shoot(ShooterState(0.0, h, 0.0), ds, _crosses_axis)
        return math.remainder(end.theta + math.pi / 3, 2 * math.pi)

    lo, hi = _bracket(closing, 0.3, 0.7, (1e-3, 0.999))
    h = _bisect(closing, lo, hi, tol)
    start = ShooterState(0.0, h, 0.0)
    end = shoot(start, ds, _crosses_axis)
    quarter = uniform_orbit(start, end.s, spacing, ds)[:, :2]
    quarter[-1, 1] = 0.0
    left = quarter[::-1].copy()
    left[:, 0] *= -1
    upper_pts = np.vstack([left, quarter[1:]])
    lower_pts = upper_pts.copy()
    lower_pts[:, 1] *= -1
    upper = DiscreteCurve(upper_pts, "upper")
    lower = DiscreteCurve(lower_pts, "lower")
    p = float(upper_pts[-1, 0])
    n_leg = _ray_samples(np.array([p, 0.0]), np.array([1.0, 0.0]), leg_spacing)
    right = _ray((p, 0.0), (HALFLINE_RADIUS, 0.0), n_leg, "right")
    left_leg = _ray((-p, 0.0), (-HALFLINE_RADIUS, 0.0), n_leg, "left")
    topo = NetworkTopology(
        (
            (CurveEnd("upper", FINISH), CurveEnd("lower", FINISH), CurveEnd("right", START)),
            (CurveEnd("upper", START), CurveEnd("lower", START), CurveEnd("left", START)),
        ),
        (
            Endpoint(CurveEnd("right", FINISH), tuple(right.finish)),
            Endpoint(CurveEnd("left", FINISH), tuple(left_leg.finish)),
        ),
    )
    net = Network((upper, lower, right, left_leg), topo)
    params = {"height": h, "junction_x": p, "closing_residual": abs(closing(h)), "ds": ds}
    return _validate("lens", net, params)


def catalog_entry(kind: str, **params) -> ShrinkerCatalogEntry:
    """Build a named shrinker: circle, triod, spoon, lens or abresch-langer."""
    if kind == "circle":
        return _validate("circle", circle_shrinker(params.get("n", 400)), {"n": params.get("n", 400)})
    if kind == "triod":
        return _validate("triod", standard_triod(), {"scale": HALFLINE_RADIUS})
    if kind == "spoon":
        return find_brakke_spoon()
    if kind == "lens":
        return find_lens()
    if kind == "abresch-langer":
        r0 = params.get("r0", 0.5)
        res = find_abresch_langer(r0)
        entry = _validate("abresch-langer", geo.closed_network(res.curve), {
            "r0": res.r0, "petals": res.petals, "windings": res.windings,
        })
        entry.residuals["closure"] = res.closure_residual
        return entry
    raise ValueError(f"unknown shrinker kind {kind!r}; expected circle, triod, spoon, lens or abresch-langer")
