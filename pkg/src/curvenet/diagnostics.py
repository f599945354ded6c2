"""Audits of the exact evolution laws and blow-up signatures along trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .errors import InsufficientWindow, LoopLost, NotShrinkingRegion, OpenLoop, TooFewSnapshots
from .geometry import Loop, Network


@dataclass(frozen=True)
class CurvatureSeminorms:
    int_k2: float
    int_ks2: float
    junction_flux: tuple[float, ...]


def curvature_derivative(curve: geo.DiscreteCurve, k: np.ndarray | None = None) -> np.ndarray:
    """dk/ds by finite differences in arclength (periodic on closed curves)."""
    if k is None:
        k = geo.curvature(curve)[0]
    if curve.closed:
        seg = geo.segment_lengths(curve)
        back = np.roll(seg, 1)
        kp, km = np.roll(k, -1), np.roll(k, 1)
        # three-point derivative on a nonuniform periodic grid
        return (back**2 * kp - seg**2 * km + (seg**2 - back**2) * k) / (seg * back * (seg + back))
    return np.gradient(k, geo.arclength(curve), edge_order=2)


def curvature_seminorms(network: Network, precomputed: dict | None = None) -> CurvatureSeminorms:
    """int k^2, int k_s^2 and the per-junction flux sum of k k_s + lambda k^2.

    ``precomputed`` maps curve ids to ``geometry.quantities`` results.
    """
    int_k2 = 0.0
    int_ks2 = 0.0
    per_curve = {}
    for c in network.curves:
        q = precomputed[c.id] if precomputed else geo.quantities(c)
        ks = curvature_derivative(c, q.k)
        int_k2 += geo.integrate(c, q.k**2)
        int_ks2 += geo.integrate(c, ks**2)
        per_curve[c.id] = (q, ks)
    flux = []
    for junction in network.topology.junctions:
        total = 0.0
        for ce in junction:
            q, ks = per_curve[ce.curve]
            j = 0 if ce.end == geo.START else -1
            # reversing orientation flips k and lambda, leaves k_s alone
            total += geo.end_sign(ce.end) * (q.k[j] * ks[j] + q.lam[j] * q.k[j] ** 2)
        flux.append(float(total))
    return CurvatureSeminorms(float(int_k2), float(int_ks2), tuple(flux))


def _require(traj, n=3):
    if len(traj.diagnostics) < n:
        raise TooFewSnapshots(f"need at least {n} snapshots, have {len(traj.diagnostics)}")


def _time_derivative(t: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.gradient(values, t, edge_order=2 if len(t) > 2 else 1)


@dataclass
class LengthAudit:
    t: np.ndarray
    L: np.ndarray
    dLdt: np.ndarray
    int_k2: np.ndarray

    @property
    def residual(self) -> np.ndarray:
        return self.dLdt + self.int_k2

    @property
    def relative(self) -> np.ndarray:
        return np.abs(self.residual) / np.maximum(self.int_k2, 1.0)

    columns = ("t", "L", "dLdt", "int_k2", "residual", "relative")

    def rows(self):
        return zip(self.t, self.L, self.dLdt, self.int_k2, self.residual, self.relative)


def length_law_audit(trajectory) -> LengthAudit:
    """Measured dL/dt against -int k^2 ds on every snapshot."""
    _require(trajectory)
    t = trajectory.column("t")
    L = trajectory.column("L_total")
    return LengthAudit(t, L, _time_derivative(t, L), trajectory.column("int_k2"))


def loop_junction_count(loop: Loop, network: Network) -> int:
    """Number of triple-junction corners on a loop; a smooth closed curve has none."""
    if all(network.curve(cid).closed for cid in loop.curve_ids):
        return 0
    return len(loop.traversals)


def expected_area_rate(m: int) -> float:
    return -(2.0 - m / 3.0) * math.pi


@dataclass
class AreaAudit:
    loop: str
    m: int
    t: np.ndarray
    A: np.ndarray
    dAdt: np.ndarray
    expected: float
    slope: float

    @property
    def residual(self) -> np.ndarray:
        return self.dAdt - self.expected

    @property
    def slope_error(self) -> float:
        if self.expected == 0.0:
            return abs(self.slope)
        return abs(self.slope - self.expected) / abs(self.expected)

    columns = ("t", "A", "dAdt", "expected", "residual")

    def rows(self):
        return zip(self.t, self.A, self.dAdt, np.full_like(self.t, self.expected), self.residual)


def area_law_audit(trajectory, loop: Loop) -> AreaAudit:
    """Measured A'(t) of one loop against -(2 - m/3) pi, plus a least-squares slope."""
    _require(trajectory)
    key = f"area_{loop.name}"
    t = trajectory.column("t")
    if key in trajectory.diagnostics[0]:
        A = trajectory.column(key)
    else:
        try:
            A = np.array([geo.enclosed_area(loop, net) for _, net in trajectory.snapshots])
        except OpenLoop as exc:
            raise LoopLost(f"loop {loop.name}: {exc}") from None
    if not np.all(np.isfinite(A)) or np.any(A <= 0):
        raise LoopLost(f"loop {loop.name} is lost before the end of the window")
    m = loop_junction_count(loop, trajectory.snapshots[0][1])
    slope = float(np.polyfit(t, A, 1)[0])
    return AreaAudit(loop.name, m, t, A, _time_derivative(t, A), expected_area_rate(m), slope)


@dataclass(frozen=True)
class ExtinctionBound:
    bound: float
    universal: float


def extinction_bound(A0: float, m: int) -> ExtinctionBound:
    """Upper bound on the lifetime of a region of area A0 bounded by m curves."""
    if m >= 6:
        raise NotShrinkingRegion(f"a region bounded by {m} curves need not shrink")
    if A0 < 0:
        raise ValueError("area must be nonnegative")
    return ExtinctionBound(A0 / ((2.0 - m / 3.0) * math.pi), 3.0 * A0 / math.pi)


def estimate_blowup_time(trajectory, fraction: float = 0.1, method: str = "curvature") -> float:
    """Extrapolate the singular time linearly over the last ``fraction`` of the run.

    ``curvature`` fits 1/sup k^2, which is affine in t for shrinking circles;
    ``length`` fits (min length)^2, the same quantity for a homothetic collapse.
    The window is a share of elapsed time rather than a sample count, so the
    estimate does not depend on how often snapshots were recorded.
    """
    _require(trajectory, 2)
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    t_all = trajectory.column("t")
    sel = t_all >= t_all[-1] - fraction * (t_all[-1] - t_all[0])
    if sel.sum() < 2:
        sel[-2:] = True
    t = t_all[sel]
    if method == "curvature":
        y = 1.0 / trajectory.column("sup_k")[sel] ** 2
    elif method == "length":
        y = trajectory.column("min_len")[sel] ** 2
    else:
        raise ValueError(f"unknown method {method!r}")
    slope, intercept = np.polyfit(t, y, 1)
    if slope >= 0:
        return math.inf
    return float(-intercept / slope)


@dataclass(frozen=True)
class BlowupFit:
    blowup: bool
    T: float = math.nan
    k2_exponent: float = math.nan
    k2_constant: float = math.nan
    supk2_exponent: float = math.nan
    supk2_constant: float = math.nan
    window: tuple[float, float] = (math.nan, math.nan)


def blowup_fit(trajectory, window: tuple[float, float] | None = None, T: float | None = None) -> BlowupFit:
    """Power-law fits of int k^2 and sup k^2 against T - t.

    ``window`` bounds T - t; by default the last decade before the final sample.
    A trajectory that did not end in a singularity yields ``blowup=False``.
    """
    term = trajectory.termination
    if term is None or not term.singular:
        return BlowupFit(False)
    if T is None:
        T = estimate_blowup_time(trajectory)
    t = trajectory.column("t")
    tau = T - t
    if window is None:
        lo = tau[-1]
        window = (lo, 10.0 * lo)
    sel = (tau >= window[0]) & (tau <= window[1]) & (tau > 0)
    if sel.sum() < 3:
        raise InsufficientWindow(f"only {int(sel.sum())} samples with T - t in {window}")
    x = np.log(tau[sel])
    fit_k2 = np.polyfit(x, np.log(trajectory.column("int_k2")[sel]), 1)
    fit_sup = np.polyfit(x, np.log(trajectory.column("sup_k")[sel] ** 2), 1)
    return BlowupFit(
        True,
        float(T),
        float(fit_k2[0]),
        float(math.exp(fit_k2[1])),
        float(fit_sup[0]),
        float(math.exp(fit_sup[1])),
        (float(window[0]), float(window[1])),
    )


def singularity_classify(trajectory) -> dict:
    """Termination record: kind of singularity, offending curves and final values."""
    term = trajectory.termination
    if term is None or not term.singular:
        return {"classification": "NoSingularity", "t": term.t if term else math.nan}
    return {
        "classification": term.classification,
        "t": term.t,
        "collapsing_curves": list(term.collapsing_curves),
        "blowup_curves": list(term.blowup_curves),
        **term.values,
    }
