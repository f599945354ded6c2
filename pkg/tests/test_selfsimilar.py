import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvenet import geometry as geo
from curvenet import selfsimilar as ss
from curvenet.errors import NoClosureInWindow, RangeOutOfDomain
from curvenet.geometry import DiscreteCurve


def test_grim_reaper_profile_and_frame():
    c = ss.grim_reaper(N=400)
    y = c.points[:, 1]
    # x = -log cos y, so y = pi/3 gives log 2
    x_at = np.interp(math.pi / 3, y, c.points[:, 0])
    assert x_at == pytest.approx(math.log(2), abs=1e-4)
    tau, nu, k = ss.grim_reaper_frame(y)
    # exact frame: k - <nu, e1> vanishes identically
    assert np.abs(k - nu[:, 0]).max() < 1e-12
    assert np.abs(np.hypot(*tau.T) - 1).max() < 1e-12
    assert ss.translator_residual(c).sup < 1e-4


def test_grim_reaper_domain():
    with pytest.raises(RangeOutOfDomain):
        ss.grim_reaper((-1.6, 1.0))


def test_circle_is_shrinker_only_at_radius_one():
    assert ss.shrinker_residual(ss.circle_shrinker()).sup < 1e-4
    r2 = ss.shrinker_residual(geo.closed_network(geo.circle_curve(2.0, 400)))
    # |k - r| = |1/2 - 2|
    assert r2.sup == pytest.approx(1.5, abs=1e-4)


def test_standard_triod_is_shrinker_with_density_three_halves():
    entry = ss.catalog_entry("triod")
    assert entry.residuals["shrinker_sup"] < 1e-12
    assert entry.density == pytest.approx(1.5, abs=1e-3)


def test_rotator_residuals():
    # a circle centered at the origin has <eta, tau> = 0 and is not a rotator
    c = geo.circle_curve(1.0, 200)
    assert ss.rotator_residual(c, 3.0).sup == pytest.approx(1.0, abs=1e-3)
    # the spiral r = exp(theta) has radial tangent component r / sqrt(2) and k = 1/(sqrt(2) r)
    th = np.linspace(0, 1.0, 2001)
    r = np.exp(th)
    spiral = DiscreteCurve(np.column_stack([r * np.cos(th), r * np.sin(th)]), "s")
    res = ss.rotator_residual(spiral, 0.0)
    assert np.allclose(res.pointwise[5:-5], 1 / (math.sqrt(2) * r[5:-5]), atol=1e-5)


def test_fit_rotation_speed_on_line_is_zero():
    c = geo.segment_curve((0.1, 0), (1, 0.3), 20)
    assert ss.fit_rotation_speed(c) == pytest.approx(0.0, abs=1e-10)


def test_shooting_preserves_unit_circle():
    state = ss.ShooterState(1.0, 0.0, math.pi / 2)
    n = int(round(2 * math.pi / 1e-3))
    ds = 2 * math.pi / n
    worst = 0.0
    for _ in range(n):
        state = ss.shrinker_ode_step(state, ds)
        worst = max(worst, abs(math.hypot(state.x, state.y) - 1.0))
    assert worst < 1e-8
    assert math.hypot(state.x - 1.0, state.y) < 1e-8


def test_shooting_mirror_symmetry():
    a = ss.ShooterState(0.4, 0.2, 1.1)
    fwd = a
    mir = a.mirrored()
    for _ in range(500):
        fwd = ss.shrinker_ode_step(fwd, 1e-3)
        mir = ss.shrinker_ode_step(mir, 1e-3)
    m = fwd.mirrored()
    assert (mir.x, mir.y, mir.theta) == pytest.approx((m.x, m.y, m.theta), abs=1e-13)


def test_brakke_spoon():
    entry = ss.find_brakke_spoon()
    assert entry.residuals["angle"] < 1e-6
    assert entry.residuals["shrinker_sup"] < 1e-4
    assert entry.parameters["junction_x"] == pytest.approx(-0.8054, abs=1e-4)
    assert entry.density == pytest.approx(1.69943, abs=1e-4)
    loop = entry.network.curve("loop").points
    # symmetric about the x-axis
    assert np.abs(loop[::-1, 1] + loop[:, 1]).max() < 1e-12
    assert geo.check_embedded(entry.network) == []


def test_lens():
    entry = ss.find_lens()
    assert entry.residuals["angle"] < 1e-6
    assert entry.residuals["shrinker_sup"] < 1e-4
    assert entry.parameters["height"] == pytest.approx(0.61164, abs=1e-4)
    assert entry.density == pytest.approx(1.78969, abs=1e-4)
    up, lo = entry.network.curve("upper").points, entry.network.curve("lower").points
    assert np.array_equal(up[:, 0], lo[:, 0]) and np.array_equal(up[:, 1], -lo[:, 1])
    assert np.abs(up[::-1, 0] + up[:, 0]).max() < 1e-12


def test_abresch_langer_closes():
    res = ss.find_abresch_langer(0.5)
    assert (res.petals, res.windings) == (16, 11)
    assert res.closure_residual < 1e-6
    assert ss.shrinker_residual(geo.closed_network(res.curve)).sup < 1e-3
    circle = ss.find_abresch_langer(1.0)
    assert circle.petals == 1 and circle.closure_residual == 0.0


def test_abresch_langer_outside_window():
    with pytest.raises(NoClosureInWindow):
        ss.find_abresch_langer(5.0)


def test_catalog_rejects_unknown_kind():
    with pytest.raises(ValueError):
        ss.catalog_entry("fish")


@settings(max_examples=20, deadline=None)
@given(x=st.floats(-1.5, 1.5), y=st.floats(-1.5, 1.5), th=st.floats(-math.pi, math.pi))
def test_shooting_is_rotation_equivariant(x, y, th):
    # the shrinker system commutes with rotations about the origin
    phi = 0.7
    c, s = math.cos(phi), math.sin(phi)
    a = ss.ShooterState(x, y, th)
    b = ss.ShooterState(c * x - s * y, s * x + c * y, th + phi)
    for _ in range(100):
        a = ss.shrinker_ode_step(a, 1e-2)
        b = ss.shrinker_ode_step(b, 1e-2)
    assert b.x == pytest.approx(c * a.x - s * a.y, abs=1e-9)
    assert b.y == pytest.approx(s * a.x + c * a.y, abs=1e-9)
    assert b.theta == pytest.approx(a.theta + phi, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(r=st.floats(0.3, 3.0))
def test_circle_shrinker_residual_property(r):
    res = ss.shrinker_residual(geo.closed_network(geo.circle_curve(r, 512)))
    assert res.sup == pytest.approx(abs(1 / r - r), abs=1e-4 * (1 + 1 / r))
