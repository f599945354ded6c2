"""Command-line entry point: ``curvenet {run,analyze,shrinker,validate}``.

Exit codes: 0 success, 2 validation failure, 3 solver error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from . import geometry as geo
from . import monotonicity as mono
from . import selfsimilar as ss
from .cli_io import (
    RunConfig,
    load_network,
    load_trajectory,
    save_network,
    save_trajectory,
    write_csv,
)
from .errors import (
    CurvenetError,
    IntegrityError,
    MissingSnapshots,
    NotGeometricallyAdmissible,
    ParseError,
)
from .flow_solver import FlowState, check_admissible, evolve, make_admissible

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_IO = 4

log = logging.getLogger("curvenet")


def _report_text(report) -> str:
    names = {
        1: "network structure",
        2: "regular parametrization",
        3: "concurrency",
        4: "angle sum",
        5: "junction velocity match",
        6: "endpoint positions",
        7: "endpoint second derivative",
    }
    lines = []
    for c in sorted(report.residuals):
        flag = "ok  " if report.flags[c] else "FAIL"
        lines.append(f"  [{flag}] {c} {names[c]:<28} residual {report.residuals[c]:.3e}  tol {report.tolerances[c]:.1e}")
    lines.append("PASS" if report.passed else "FAIL")
    return "\n".join(lines)


def _print_report(report) -> None:
    print(_report_text(report))
    print(json.dumps(report.as_dict(), indent=1, default=float))


def _resample(network: geo.Network, n: int | None) -> geo.Network:
    if n is None:
        return network
    return network.with_curves(geo.resample_arclength(c, n) for c in network.curves)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    network = load_network(args.path)
    report = check_admissible(network, args.compat_tol, args.angle_tol)
    _print_report(report)
    if report.passed or not args.make_admissible:
        return EXIT_OK if report.passed else EXIT_VALIDATION
    try:
        fixed = make_admissible(network, compat_tol=args.compat_tol, angle_tol=args.angle_tol)
    except NotGeometricallyAdmissible as exc:
        print(f"cannot reparametrize: {exc}")
        return EXIT_VALIDATION
    report = check_admissible(fixed, args.compat_tol, args.angle_tol)
    print("after reparametrization:")
    _print_report(report)
    out = Path(args.out) if args.out else Path(args.path).with_suffix(".admissible.network")
    save_network(fixed, out)
    print(f"wrote {out}")
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_run(args) -> int:
    cfg = RunConfig.from_sources(
        args.config,
        input=args.input,
        dt=args.dt,
        t_max=args.t_max,
        n=args.n,
        L_min=args.L_min,
        K_max=args.K_max,
        record_every=args.record_every,
        output=args.out,
        make_admissible=True if args.make_admissible else None,
    )
    if not cfg.input:
        raise ParseError("no input network given")
    network = _resample(load_network(cfg.input), cfg.n)
    report = check_admissible(network, cfg.compat_tol, cfg.angle_tol)
    if not report.passed:
        if not cfg.make_admissible:
            print("input is not admissible (use --make-admissible to reparametrize):")
            _print_report(report)
            return EXIT_VALIDATION
        try:
            network = make_admissible(network, compat_tol=cfg.compat_tol, angle_tol=cfg.angle_tol)
        except NotGeometricallyAdmissible as exc:
            print(f"cannot reparametrize: {exc}")
            return EXIT_VALIDATION
    solver_cfg = cfg.solver_config()
    traj = evolve(FlowState(0.0, network, cfg.dt), solver_cfg, cfg.t_max)
    extra = {}
    if traj.termination.singular and len(traj.diagnostics) >= 2:
        extra["T_estimate"] = dg.estimate_blowup_time(traj)
    out = save_trajectory(traj, cfg.output_dir(), extra)
    term = traj.termination
    print(f"stopped at t={term.t:.6g}: {term.reason} ({term.classification})")
    if "T_estimate" in extra:
        print(f"estimated singular time T={extra['T_estimate']:.6g}")
    print(f"wrote {len(traj.snapshots)} snapshots to {out}")
    return EXIT_OK


def _probe_time(traj, rec_T: float | None, override: float | None) -> float:
    if override is not None:
        return override
    if rec_T is not None and math.isfinite(rec_T):
        return rec_T
    # no singularity: look slightly past the last snapshot
    times = traj.times
    return float(times[-1] + max(times[-1] - times[0], 1e-3) * 1e-2)


def cmd_analyze(args) -> int:
    root = Path(args.directory)
    traj = load_trajectory(root)
    out = Path(args.out) if args.out else root / "analysis"
    out.mkdir(parents=True, exist_ok=True)
    term = traj.termination
    T = None
    if term is not None and term.singular:
        T = term.values.get("T_estimate")
        if T is None:
            T = dg.estimate_blowup_time(traj)
    written = []
    if len(traj.diagnostics) >= 3:
        audit = dg.length_law_audit(traj)
        written.append(write_csv(out / "length_law.csv", audit.columns, audit.rows()))
        for loop in traj.loops:
            try:
                area = dg.area_law_audit(traj, loop)
            except CurvenetError as exc:
                log.warning("area audit of %s skipped: %s", loop.name, exc)
                continue
            written.append(write_csv(out / f"area_{loop.name}.csv", area.columns, area.rows()))
            print(f"{loop.name}: m={area.m} fitted slope {area.slope:.6g} expected {area.expected:.6g}")
    if T is not None:
        try:
            fit = dg.blowup_fit(traj, T=T)
            cols = ("T", "k2_exponent", "k2_constant", "supk2_exponent", "supk2_constant", "window_lo", "window_hi")
            row = (fit.T, fit.k2_exponent, fit.k2_constant, fit.supk2_exponent, fit.supk2_constant, *fit.window)
            written.append(write_csv(out / "blowup.csv", cols, [row]))
        except CurvenetError as exc:
            log.warning("blow-up fit skipped: %s", exc)
    t0 = _probe_time(traj, T, args.t0)
    limits = []
    for i, (x, y) in enumerate(args.probe or []):
        audit = mono.monotonicity_audit(traj, t0, (x, y))
        written.append(write_csv(out / f"monotonicity_{i}.csv", audit.columns, audit.rows()))
        try:
            lim = mono.limit_density(traj, (x, y), t0, K=args.tail)
            limits.append((x, y, t0, lim.value))
            print(f"probe ({x:g}, {y:g}) at t0={t0:.6g}: limit density {lim.value:.6f}")
        except CurvenetError as exc:
            log.warning("limit density at (%g, %g) skipped: %s", x, y, exc)
    if limits:
        written.append(write_csv(out / "limit_density.csv", ("x", "y", "t0", "density"), limits))
    if args.density_map:
        xs = np.linspace(*args.density_map[0:2], int(args.density_map[2]))
        ys = np.linspace(*args.density_map[3:5], int(args.density_map[5]))
        t_last, net = [(t, n) for t, n in traj.snapshots if t < t0][-1]
        grid = mono.density_map(net, t0, t_last, xs, ys, workers=args.workers)
        written.append(write_csv(out / "density_map.csv", ("x", "y", "density"), grid))
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_shrinker(args) -> int:
    params = {}
    if args.r0 is not None:
        params["r0"] = args.r0
    entry = ss.catalog_entry(args.kind, **params)
    out = Path(args.out) if args.out else RunConfig().output_dir() / f"{args.kind}.network"
    save_network(entry.network, out, entry.metadata())
    print(f"{entry.kind}: density {entry.density:.6f}")
    for key, value in entry.residuals.items():
        print(f"  {key}: {value:.3e}")
    print(f"wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvenet", description="Curvature flow of planar networks.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evolve a network and write a trajectory directory")
    p.add_argument("input", nargs="?", help="network file")
    p.add_argument("--config", help="YAML file with run settings (flags override it)")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--n", type=int, help="resample every curve to this many intervals")
    p.add_argument("--L-min", dest="L_min", type=float, help="stop when a curve is shorter")
    p.add_argument("--K-max", dest="K_max", type=float, help="stop when sup |k| exceeds this")
    p.add_argument("--record-every", dest="record_every", type=int)
    p.add_argument("--out", help="output directory (default: $CURVENET_OUTPUT_DIR or ./curvenet-out)")
    p.add_argument("--make-admissible", action="store_true", help="reparametrize inadmissible input")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analyze", help="audit a trajectory directory")
    p.add_argument("directory")
    p.add_argument("--probe", nargs=2, type=float, action="append", metavar=("X", "Y"),
                   help="density probe center (repeatable)")
    p.add_argument("--t0", type=float, help="kernel time (default: estimated singular time)")
    p.add_argument("--tail", type=int, default=10, help="snapshots used for the limit density")
    p.add_argument("--density-map", nargs=6, type=float,
                   metavar=("XMIN", "XMAX", "NX", "YMIN", "YMAX", "NY"))
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--out", help="directory for audit CSVs (default: DIRECTORY/analysis)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("shrinker", help="construct a self-similarly shrinking network")
    p.add_argument("kind", choices=("circle", "triod", "spoon", "lens", "abresch-langer"))
    p.add_argument("--r0", type=float, help="starting radius for abresch-langer")
    p.add_argument("--out", help="output network file")
    p.set_defaults(func=cmd_shrinker)

    p = sub.add_parser("validate", help="check the compatibility conditions of a network file")
    p.add_argument("path")
    p.add_argument("--make-admissible", action="store_true")
    p.add_argument("--out", help="where to write the reparametrized network")
    p.add_argument("--compat-tol", type=float, default=1e-3)
    p.add_argument("--angle-tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ParseError, IntegrityError, MissingSnapshots) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CurvenetError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
