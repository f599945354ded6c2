"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from curvenet import cli_io
from curvenet import diagnostics as dg
from curvenet import flow_solver as fs
from curvenet import geometry as geo
from curvenet import monotonicity as mono
from curvenet import selfsimilar as ss

from helpers import (
    ACCEPTANCE_LINES,
    circle_flow,
    curved_triod,
    flow,
    hausdorff,
    lens_flow,
    spoon_flow,
    straight_triod,
)

FIXTURES = Path(__file__).parent / "fixtures"
CIRCLE_DT = 1e-5

pytestmark = pytest.mark.slow


def _tol(tol) -> str:
    return tol if isinstance(tol, str) else f"tol {tol:.1g}"


def report(number: int, title: str, checks: list[tuple]) -> bool:
    """Print one line for the criterion; each check is (name, measured, tolerance, ok).

    A string tolerance describes a qualitative requirement.
    """
    ok = all(c[3] for c in checks)
    detail = "; ".join(f"{name}={value:.4g} ({_tol(tol)})" for name, value, tol, _ in checks)
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def _circle_T() -> float:
    return dg.estimate_blowup_time(circle_flow())


def test_01_circle_extinction():
    traj = circle_flow()
    T = _circle_T()
    t_err = abs(T - 0.5) / 0.5
    r_err = 0.0
    for t, net in traj.snapshots:
        r = np.hypot(*net.curves[0].points.T)
        r_err = max(r_err, float(np.abs(r - math.sqrt(1 - 2 * t)).max()))
    assert report(1, "circle extinction", [
        ("T relative error", t_err, 1e-2, t_err < 1e-2),
        ("max radius error", r_err, 5e-3, r_err < 5e-3),
    ])


def test_02_length_law():
    traj = circle_flow()
    audit = dg.length_law_audit(traj)
    keep = audit.t < _circle_T() - 10 * CIRCLE_DT
    rel = np.abs(audit.residual[keep]) / audit.int_k2[keep]
    worst = float(rel.max())
    assert report(2, "length law", [("max |dL/dt + int k^2| / int k^2", worst, 2e-2, worst < 2e-2)])


def test_03_area_law():
    checks = []
    for name, traj, tol in (("spoon", spoon_flow(), 2e-2), ("lens", lens_flow(), 2e-2), ("circle", circle_flow(), 1e-2)):
        (loop,) = traj.loops
        audit = dg.area_law_audit(traj, loop)
        checks.append((f"{name} m={audit.m} slope error", audit.slope_error, tol, audit.slope_error < tol))
        bound = dg.extinction_bound(audit.A[0], audit.m).bound
        t_end = traj.termination.t
        checks.append((f"{name} collapse t - bound", t_end - bound, "<= 0", traj.termination.singular and t_end <= bound))
    assert report(3, "area law", checks)


def test_04_stationary_triod():
    net = straight_triod(n=40)
    state = fs.FlowState(0.0, net, 1e-4)
    cfg = fs.SolverConfig(dt=1e-4)
    for _ in range(1000):
        state = fs.step(state, cfg)
    worst = max(hausdorff(a.points, b.points) for a, b in zip(net.curves, state.network.curves))
    assert report(4, "stationary triod", [("Hausdorff displacement", worst, 1e-6, worst < 1e-6)])


def _identity_residuals(N: int) -> dict:
    net = fs.make_admissible(curved_triod(N))
    traj = flow(net, 0.25 / N**2, 0.02, record_every=max(1, N // 10))
    worst = {"k_sum": 0.0, "lam_sum": 0.0, "k2_minus_lam2": 0.0, "k_lam": 0.0}
    for _, snap in traj.snapshots:
        (jr,) = fs.junction_residuals(snap)
        for key in worst:
            worst[key] = max(worst[key], getattr(jr, key))
    return worst


def test_05_junction_identities():
    grids = (100, 200, 400)
    res = [_identity_residuals(N) for N in grids]
    checks = []
    for key in res[0]:
        orders = [math.log2(res[i][key] / res[i + 1][key]) for i in range(2)]
        order = min(orders)
        checks.append((f"{key} order", order, ">= 1", order >= 1.0))
    assert report(5, "junction identities under refinement", checks)


def test_06_blowup_rate():
    fit = dg.blowup_fit(circle_flow(), T=_circle_T())
    e1, e2 = fit.k2_exponent, fit.supk2_exponent
    assert report(6, "blow-up rate", [
        ("int k^2 exponent + 0.5", abs(e1 + 0.5), 0.05, abs(e1 + 0.5) <= 0.05),
        ("sup k^2 exponent + 1", abs(e2 + 1.0), 0.1, abs(e2 + 1.0) <= 0.1),
    ])


def test_07_density_ledger():
    line = geo.fixed_ends_network(geo.segment_curve((-40, 0), (40, 0), 1600))
    half = geo.fixed_ends_network(geo.segment_curve((0, 0), (40, 0), 800))
    d_line = mono.gaussian_density(line, 1.0, (0, 0), 0.5)
    d_half = mono.gaussian_density(half, 1.0, (0, 0), 0.5)
    d_triod = mono.rescaled_density(ss.standard_triod())
    lim = mono.limit_density(circle_flow(), (0.0, 0.0), _circle_T()).value
    target = math.sqrt(2 * math.pi) * math.exp(-0.5)
    assert report(7, "Gaussian density ledger", [
        ("line - 1", abs(d_line - 1), 1e-3, abs(d_line - 1) <= 1e-3),
        ("halfline - 1/2", abs(d_half - 0.5), 1e-3, abs(d_half - 0.5) <= 1e-3),
        ("triod - 3/2", abs(d_triod - 1.5), 1e-3, abs(d_triod - 1.5) <= 1e-3),
        ("circle limit - sqrt(2 pi/e)", abs(lim - target), 5e-3, abs(lim - target) <= 5e-3),
    ])


def test_08_monotonicity():
    t0, x0 = 0.5, (0.3, 0.1)
    audit = mono.monotonicity_audit(circle_flow(), t0, x0)
    inc = audit.max_increment
    residuals = []
    for N, dt in ((50, 4e-4), (100, 1e-4), (200, 2.5e-5)):
        traj = flow(geo.closed_network(geo.circle_curve(1.0, N)), dt, 0.3, record_every=10)
        residuals.append(float(np.abs(mono.monotonicity_audit(traj, t0, x0).residual).max()))
    converging = residuals[0] > residuals[1] > residuals[2]
    T = _circle_T()
    # self-similar probe, restricted to snapshots resolved by the time step
    probe = [d for (t, net) in circle_flow().snapshots if 2 * (T - t) >= 2000 * CIRCLE_DT
             for d in [mono.dissipation(net, T, (0.0, 0.0), t)]]
    diss = max(probe)
    assert report(8, "monotonicity", [
        ("max Theta increment", inc, 1e-4, inc <= 1e-4),
        ("identity residual N=50", residuals[0], "decreasing", converging),
        ("N=100", residuals[1], "decreasing", converging),
        ("N=200", residuals[2], "decreasing", converging),
        ("self-similar dissipation", diss, 1e-4, diss < 1e-4),
    ])


def test_09_selfsimilar_catalog():
    circle = ss.shrinker_residual(ss.circle_shrinker()).sup
    triod = ss.shrinker_residual(ss.standard_triod()).sup
    reaper = ss.translator_residual(ss.grim_reaper(N=400)).sup
    spoon = ss.find_brakke_spoon()
    lens = ss.find_lens()
    al = ss.find_abresch_langer(0.5)
    assert report(9, "self-similar catalog", [
        ("circle", circle, 1e-4, circle < 1e-4),
        ("triod", triod, 1e-4, triod < 1e-4),
        ("grim reaper", reaper, 1e-4, reaper < 1e-4),
        ("spoon angle", spoon.residuals["angle"], 1e-6, spoon.residuals["angle"] < 1e-6),
        ("spoon shrinker", spoon.residuals["shrinker_sup"], 1e-4, spoon.residuals["shrinker_sup"] < 1e-4),
        ("lens angle", lens.residuals["angle"], 1e-6, lens.residuals["angle"] < 1e-6),
        ("lens shrinker", lens.residuals["shrinker_sup"], 1e-4, lens.residuals["shrinker_sup"] < 1e-4),
        (f"Abresch-Langer {al.petals}/{al.windings} closure", al.closure_residual, 1e-6, al.closure_residual < 1e-6),
    ])


def test_10_rescaling_consistency():
    worst = 0.0
    for traj in (circle_flow(), spoon_flow()):
        T = dg.estimate_blowup_time(traj)
        for x0 in ((0.0, 0.0), (0.4, -0.2)):
            for t, net in traj.snapshots:
                if t >= T:
                    continue
                direct = mono.gaussian_density(net, T, x0, t)
                rescaled = mono.rescaled_density(mono.huisken_rescale(net, t, x0, T))
                worst = max(worst, abs(direct - rescaled))
    assert report(10, "rescaling consistency", [("max |Theta - rescaled|", worst, 1e-12, worst <= 1e-12)])


def test_11_embeddedness():
    triod = flow(fs.make_admissible(curved_triod(100)), 2.5e-5, 0.05, record_every=20)
    spoon = spoon_flow()
    hits = 0
    count = 0
    for traj in (triod, spoon):
        for _, net in traj.snapshots:
            hits += len(geo.check_embedded(net))
            count += 1
    assert report(11, "embeddedness preserved", [(f"contacts over {count} snapshots", hits, "must be 0", hits == 0)])


def test_12_io_round_trip(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("acceptance-io")
    files = sorted(FIXTURES.glob("*.network"))
    ok = 0
    for path in files:
        net, meta = cli_io.load_network(path, with_metadata=True)
        again = cli_io.load_network(cli_io.save_network(net, tmp / path.name, meta))
        ok += all(np.array_equal(a.points, b.points) for a, b in zip(net.curves, again.curves)) \
            and net.topology == again.topology
    traj = flow(geo.closed_network(geo.circle_curve(0.3, 40)), 1e-4, 1.0, record_every=50)
    root = cli_io.save_trajectory(traj, tmp / "run")
    audit = dg.length_law_audit(traj)
    cli_io.write_csv(root / "length_law.csv", audit.columns, audit.rows())
    csvs = sorted(root.glob("*.csv"))
    parsed = 0
    for p in csvs:
        header, table = cli_io.read_csv(p)
        parsed += bool(header) and table.shape[1] == len(header)
    frac_net = ok / len(files)
    frac_csv = parsed / len(csvs)
    assert report(12, "I/O round trip", [
        (f"networks round-tripped ({len(files)})", frac_net, "must be 1", frac_net == 1.0),
        (f"CSVs re-parsed ({len(csvs)})", frac_csv, "must be 1", frac_csv == 1.0),
    ])


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
