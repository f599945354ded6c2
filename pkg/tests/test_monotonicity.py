import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvenet import geometry as geo
from curvenet import monotonicity as mono
from curvenet import selfsimilar as ss
from curvenet.errors import BadTimeOrder, InsufficientTail

from helpers import circle_flow, flow


def _line(n=1600, half=40.0, angle=0.0, offset=(0.0, 0.0)):
    d = np.array([math.cos(angle), math.sin(angle)])
    o = np.asarray(offset, dtype=float)
    return geo.fixed_ends_network(geo.segment_curve(o - half * d, o + half * d, n))


def test_kernel_values():
    assert mono.backward_heat_kernel(1.0, (0, 0), 0.75, (0, 0)) == pytest.approx(1 / math.sqrt(math.pi))
    val = mono.backward_heat_kernel(1.0, (0, 0), 0.5, (1.0, 0.0))
    assert val == pytest.approx(math.exp(-0.5) / math.sqrt(2 * math.pi))
    with pytest.raises(BadTimeOrder):
        mono.backward_heat_kernel(1.0, (0, 0), 1.0, (0, 0))


def test_line_halfline_triod_densities():
    assert mono.gaussian_density(_line(), 1.0, (0, 0), 0.5) == pytest.approx(1.0, abs=1e-3)
    half = geo.fixed_ends_network(geo.segment_curve((0, 0), (40, 0), 800))
    assert mono.gaussian_density(half, 1.0, (0, 0), 0.5) == pytest.approx(0.5, abs=1e-3)
    assert mono.rescaled_density(ss.standard_triod()) == pytest.approx(1.5, abs=1e-3)


def test_circle_density_closed_form():
    # a circle of radius sqrt(2 (t0 - t)) about x0 has density sqrt(2 pi) / e^(1/2)
    net = geo.closed_network(geo.circle_curve(1.0, 800))
    assert mono.gaussian_density(net, 0.5, (0, 0), 0.0) == pytest.approx(math.sqrt(2 * math.pi) * math.exp(-0.5), abs=1e-5)


def test_rescaling_matches_density():
    traj = circle_flow()
    T, x0 = 0.5, (0.2, -0.1)
    for t, net in traj.snapshots[::20]:
        direct = mono.gaussian_density(net, T, x0, t)
        rescaled = mono.rescaled_density(mono.huisken_rescale(net, t, x0, T))
        assert abs(direct - rescaled) < 1e-12


def test_rescaled_circle_is_fixed_point():
    net = geo.closed_network(geo.circle_curve(math.sqrt(2 * 0.3), 400))
    r = mono.huisken_rescale(net, 0.2, (0, 0), 0.5)
    assert r.rescaled_time == pytest.approx(-0.5 * math.log(0.3))
    res = mono.rescaled_shrinker_residual(r)
    assert res.sup < 1e-4 and res.weighted_l2 < 1e-4


def test_length_ratio():
    best, table = mono.length_ratio_check(_line(), [(0, 0), (3, 0)], [0.5, 2.0])
    assert best == pytest.approx(2.0, abs=1e-12)
    assert table.shape == (2, 2)
    best, _ = mono.length_ratio_check(ss.standard_triod(), [(0, 0)], [1.0, 4.0])
    assert best == pytest.approx(3.0, abs=1e-12)
    far, _ = mono.length_ratio_check(_line(), [(0, 10)], [1.0])
    assert far == 0.0


def test_limit_density_needs_tail():
    traj = flow(ss.standard_triod(n=20), 1e-3, 3e-3)
    with pytest.raises(InsufficientTail):
        mono.limit_density(traj, (0, 0), 1.0, K=10)


def test_triod_theta_is_constant_away_from_pinned_ends():
    traj = flow(ss.standard_triod(n=40), 1e-3, 2e-2)
    audit = mono.monotonicity_audit(traj, 0.05, (0, 0))
    assert np.ptp(audit.theta) < 1e-12
    assert np.abs(audit.dissipation).max() < 1e-12


def test_circle_monotonicity_audit():
    traj = circle_flow()
    audit = mono.monotonicity_audit(traj, 0.5, (0.3, 0.1))
    assert audit.max_increment <= 1e-4
    assert np.all(audit.boundary == 0.0)


def test_density_map_matches_pointwise():
    net = geo.closed_network(geo.circle_curve(1.0, 200))
    grid = mono.density_map(net, 0.5, 0.0, [0.0, 0.5], [0.0, 1.0], workers=2)
    assert grid.shape == (4, 3)
    for x, y, v in grid:
        assert v == mono.gaussian_density(net, 0.5, (x, y), 0.0)


@settings(max_examples=25, deadline=None)
@given(
    angle=st.floats(0, math.pi),
    offset=st.floats(-0.5, 0.5),
    gap=st.floats(0.05, 2.0),
)
def test_line_density_property(angle, offset, gap):
    # a line at distance d from x0 has density exp(-d^2 / (4 gap))
    normal = (-math.sin(angle), math.cos(angle))
    net = _line(n=4000, half=60.0, angle=angle, offset=(offset * normal[0], offset * normal[1]))
    val = mono.gaussian_density(net, 1.0, (0, 0), 1.0 - gap)
    assert val == pytest.approx(math.exp(-offset**2 / (4 * gap)), abs=2e-3)


@settings(max_examples=25, deadline=None)
@given(scale=st.floats(0.1, 10.0), x0=st.tuples(st.floats(-1, 1), st.floats(-1, 1)))
def test_density_scale_invariance(scale, x0):
    # parabolic scaling of space and time leaves Theta unchanged
    net = geo.closed_network(geo.circle_curve(1.0, 300, center=(0.3, 0.0)))
    big = net.map_points(lambda p: scale * p)
    a = mono.gaussian_density(net, 0.4, x0, 0.0)
    b = mono.gaussian_density(big, 0.4 * scale**2, scale * np.asarray(x0), 0.0)
    assert a == pytest.approx(b, rel=1e-10, abs=1e-14)
