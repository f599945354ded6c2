import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvenet import diagnostics as dg
from curvenet import geometry as geo
from curvenet.errors import InsufficientWindow, NotShrinkingRegion, TooFewSnapshots
from curvenet.geometry import DiscreteCurve

from helpers import flow, lens_network, spoon_network, straight_triod


def _ellipse(a, b, n):
    t = np.linspace(0, 2 * math.pi, n, endpoint=False)
    return DiscreteCurve(np.column_stack([a * np.cos(t), b * np.sin(t)]), "e", closed=True), t


def test_circle_seminorms():
    sn = dg.curvature_seminorms(geo.closed_network(geo.circle_curve(2.0, 400)))
    assert sn.int_k2 == pytest.approx(math.pi, rel=5e-4)  # O(h^2) quadrature
    assert sn.int_ks2 < 1e-10
    assert sn.junction_flux == ()


def test_ellipse_curvature_derivative():
    a, b = 2.0, 1.0
    c, t = _ellipse(a, b, 2000)
    speed = np.sqrt(a**2 * np.sin(t) ** 2 + b**2 * np.cos(t) ** 2)
    # k = ab/speed^3, dk/ds = -3ab (a^2 - b^2) sin t cos t / speed^6
    exact = -3 * a * b * (a * a - b * b) * np.sin(t) * np.cos(t) / speed**6
    assert np.abs(dg.curvature_derivative(c) - exact).max() < 1e-3


def test_area_rates_and_extinction_bounds():
    assert dg.expected_area_rate(0) == pytest.approx(-2 * math.pi)
    assert dg.expected_area_rate(1) == pytest.approx(-5 * math.pi / 3)
    assert dg.expected_area_rate(2) == pytest.approx(-4 * math.pi / 3)
    assert dg.expected_area_rate(6) == 0.0
    eb = dg.extinction_bound(math.pi, 0)
    assert eb.bound == pytest.approx(0.5) and eb.universal == pytest.approx(3.0)
    with pytest.raises(NotShrinkingRegion):
        dg.extinction_bound(1.0, 6)


def test_loop_junction_counts():
    spoon, lens = spoon_network(), lens_network()
    (sl,) = geo.find_loops(spoon)
    assert dg.loop_junction_count(sl, spoon) == 1
    (ll,) = geo.find_loops(lens)
    assert dg.loop_junction_count(ll, lens) == 2
    circ = geo.closed_network(geo.circle_curve(1.0, 50))
    assert dg.loop_junction_count(geo.find_loops(circ)[0], circ) == 0


def test_audits_need_snapshots():
    traj = flow(straight_triod(), 1e-3, 1e-3)
    with pytest.raises(TooFewSnapshots):
        dg.length_law_audit(traj)


def test_length_law_on_short_circle_flow():
    traj = flow(geo.closed_network(geo.circle_curve(1.0, 100)), 1e-4, 0.05)
    audit = dg.length_law_audit(traj)
    assert np.max(audit.relative) < 2e-2
    area = dg.area_law_audit(traj, traj.loops[0])
    assert area.m == 0
    assert area.slope_error < 1e-2


def test_no_singularity_reports():
    traj = flow(straight_triod(), 1e-3, 1e-2)
    assert dg.blowup_fit(traj).blowup is False
    assert dg.singularity_classify(traj)["classification"] == "NoSingularity"


def test_blowup_fit_window_too_narrow():
    traj = flow(geo.closed_network(geo.circle_curve(0.3, 60)), 1e-4, 1.0, record_every=50)
    assert traj.termination.singular
    with pytest.raises(InsufficientWindow):
        dg.blowup_fit(traj, window=(1e-9, 2e-9))


def test_estimate_blowup_time_small_circle():
    traj = flow(geo.closed_network(geo.circle_curve(0.3, 80)), 1e-5, 1.0, record_every=20)
    assert dg.estimate_blowup_time(traj) == pytest.approx(0.045, rel=1e-2)
    assert dg.estimate_blowup_time(traj, method="length") == pytest.approx(0.045, rel=2e-2)


@settings(max_examples=30, deadline=None)
@given(A0=st.floats(0.0, 100.0), m=st.integers(0, 5))
def test_extinction_bound_property(A0, m):
    eb = dg.extinction_bound(A0, m)
    # the universal bound corresponds to the worst admissible case m = 5
    assert eb.bound <= eb.universal * (1 + 1e-12)
    assert eb.bound * abs(dg.expected_area_rate(m)) == pytest.approx(A0, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(r=st.floats(0.2, 5.0))
def test_circle_int_k2_scales_inversely(r):
    sn = dg.curvature_seminorms(geo.closed_network(geo.circle_curve(r, 256)))
    assert sn.int_k2 * r == pytest.approx(2 * math.pi, rel=1e-3)
