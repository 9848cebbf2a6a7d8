#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command-line entry point for flatlab

Subcommands build nets and thread systems, query the hybrid metric,
generate tunnel profiles, compute filling budgets, run the convergence
suite and collect reports. Every artifact goes to <out>/<YYYYmmdd-HHMMSS>/.

Exit status: 0 success, 2 invalid input, 3 construction failure,
4 a verified bound breached.
"""
import sys
import argparse
import logging
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.config import OUTPUT_DIR, SCHEMAS
from src.errors import FlatlabError, InvariantViolation, ValidationError
from src.geometry import SpherePoint, build_net, build_threads, place_endpoints
from src.geometry.sphere import chordal_distance, geodesic_distance, sphere_volume
from src.metric import build_metric, distance, export_pair_distances
from src.tunnel import (
    diameter_and_tube_check,
    generate_profile,
    profile_rows,
    profile_volume,
    surface_mesh,
)
from src.filling import ProfileParams, filling_budget, iterated_budget
from src.convergence import deviation_trend_ok, run_convergence_suite
from src.utils.artifacts import (
    ArtifactStore,
    decode_net,
    decode_profile,
    decode_threads,
    encode_budget,
    encode_net,
    encode_profile,
    encode_query,
    encode_report,
    encode_threads,
    load_artifact,
)
from src.utils.run_config import load_run_config
from src.utils.helpers import export_report_tables, export_table, validate_input_files, write_mesh
from src.data import load_and_process_all_reports
from src.visualization import ConvergenceCharts, ProfileCharts

logger = logging.getLogger("flatlab")


def _ensure_utf8() -> None:
    for stream in (sys.stdout, sys.stderr):
        encoding = (getattr(stream, 'encoding', None) or '').lower()
        if encoding != 'utf-8' and hasattr(stream, 'reconfigure'):
            stream.reconfigure(encoding='utf-8')


def _parse_point(text: str) -> SpherePoint:
    try:
        coords = [float(v) for v in text.split(',')]
    except ValueError as exc:
        raise ValidationError(f"bad coordinates {text!r}: {exc}") from exc
    return SpherePoint(np.array(coords))


def _require(*files) -> None:
    if not validate_input_files(files):
        raise ValidationError("missing input file(s): " + ", ".join(str(f) for f in files))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_net(args) -> int:
    net = build_net(args.m, args.eps, args.seed)
    store = ArtifactStore(args.out)
    path = store.write("net.json", encode_net(net))
    print(f"✅ net: m={net.m} eps={net.eps} seed={net.seed} N={net.count} -> {path}")
    return 0


def cmd_threads(args) -> int:
    _require(args.net)
    net = decode_net(load_artifact(args.net, SCHEMAS['net']))
    system = build_threads(place_endpoints(net))
    store = ArtifactStore(args.out)
    path = store.write("threads.json", encode_threads(system))
    print(f"✅ threads: N={net.count} K={system.K} rho={system.rho:.6g} -> {path}")
    return 0


def cmd_query(args) -> int:
    _require(args.threads)
    system = decode_threads(load_artifact(args.threads, SCHEMAS['threads']))
    x, y = _parse_point(args.x), _parse_point(args.y)
    if x.m != system.m or y.m != system.m:
        raise ValidationError(f"query points must lie on S^{system.m}")
    metric = build_metric(system)
    values = {
        'd_sphere': geodesic_distance(x, y),
        'd_chordal': chordal_distance(x, y),
        'd_hybrid': distance(metric, x, y),
    }
    store = ArtifactStore(args.out)
    store.write("query.json", encode_query(x.coords, y.coords, values, system.K))
    if args.dump_pairs:
        export_table(pd.DataFrame(export_pair_distances(metric), columns=['i', 'j', 'd_sphere', 'd_hybrid']),
                     store.path("pairs.csv"))
    print(f"{values['d_hybrid']:.17g}")
    return 0


def cmd_profile(args) -> int:
    profile = generate_profile(args.m, args.rho0, args.rho, args.L, samples=args.samples)
    diameter, tube_ok = diameter_and_tube_check(profile)
    doc = encode_profile(profile)
    doc.update({
        'volume': profile_volume(profile),
        'graph_length': profile.graph_length(),
        'gluing_residual': profile.gluing_residual(),
        'diameter': diameter,
        'tube_ok': tube_ok,
    })
    store = ArtifactStore(args.out)
    path = store.write("profile.json", doc)
    rows = profile_rows(profile)
    export_table(rows, store.path("profile.csv"))
    if profile.m == 2:
        vertices, faces = surface_mesh(profile)
        write_mesh(vertices, faces, store.path("profile_mesh.txt"))
    if args.html:
        ProfileCharts.radius_and_curvature(rows).write_html(str(store.path("profile.html")))
    print(f"✅ profile: m={profile.m} rho0={profile.rho0} rho={profile.rho} L={profile.L} "
          f"L'={profile.L_prime:.6g} vol={doc['volume']:.6g} diam={diameter:.6g} -> {path}")
    return 0


def cmd_budget(args) -> int:
    store = ArtifactStore(args.out)
    if args.threads:
        _require(args.threads)
        system = decode_threads(load_artifact(args.threads, SCHEMAS['threads']))
        params = ProfileParams(args.rho0_factor, args.L_policy)
        budget = iterated_budget(system, params)
        path = store.write("budget.json", encode_budget(budget))
        print(f"✅ budget: eps={budget.eps} K={budget.K} dF<={budget.total_dF:.6g} "
              f"dGH<={budget.total_dGH:.6g} dF/eps={budget.dF_per_eps:.6g} -> {path}")
        return 0
    if not args.profile:
        raise ValidationError("budget needs --threads or --profile")
    _require(args.profile)
    profile = decode_profile(load_artifact(args.profile, SCHEMAS['profile']))
    vol = args.vol if args.vol is not None else sphere_volume(profile.m)
    diam = args.diam if args.diam is not None else np.pi
    budget = filling_budget(profile, vol, diam)
    path = store.write("budget.json", encode_budget(budget))
    print(f"✅ budget: h={budget.h:.6g} h0={budget.h0:.6g} dF<={budget.dF_bound:.6g} "
          f"dGH<={budget.dGH_bound:.6g} -> {path}")
    return 0


def cmd_verify(args) -> int:
    if args.config:
        _require(args.config)
    config = load_run_config(args.config, args.override)
    print("\n" + "=" * 70)
    print(f"🔬 CONVERGENCE SUITE  m={config.m}  schedule={list(config.schedule)}  seeds={list(config.seeds)}")
    print("=" * 70)
    report = run_convergence_suite(
        m=config.m,
        schedule=config.schedule,
        seeds=config.seeds,
        sample_size=config.sample_size,
        near_size=config.near_size,
        gh_points=config.gh_points,
        workers=config.workers,
        params=config.profile_params,
        tolerances=config.tolerances,
    )
    breaches = report.breaches()
    trend_ok = deviation_trend_ok(report.sup_by_eps())
    store = ArtifactStore(args.out or config.output_dir)
    path = store.write("report.json", encode_report(report, {
        'config': config.to_dict(),
        'trend_ok': trend_ok,
        'breaches': breaches,
    }))
    export_report_tables(report, store.run_dir)

    for r in report.per_eps:
        if r.status != 'ok':
            print(f"⚠️  eps={r.eps} seed={r.seed}: {r.error}")
            continue
        mark = "✅" if r.twelve_eps_ok and r.lambda_ok else "❌"
        print(f"{mark} eps={r.eps} seed={r.seed} N={r.N} K={r.K} sup_dev={r.sup_deviation:.6g} "
              f"ratio=[{r.min_ratio:.6g}, {r.max_ratio:.6g}] gh={r.gh_estimate:.6g}")
    if not trend_ok:
        print("⚠️  sup deviation does not decrease along the schedule")
    if breaches:
        raise InvariantViolation("; ".join(breaches))
    print(f"✅ verify: {len(report.per_eps)} record(s), all bounds hold -> {path}")
    return 0


def cmd_report(args) -> int:
    tables = load_and_process_all_reports(args.runs)
    store = ArtifactStore(args.out)
    export_table(tables['combined'], store.path("combined.csv"))
    export_table(tables['trend'], store.path("trend.csv"))
    export_table(tables['runs'], store.path("runs.csv"))
    for run in tables['runs'].loc[~tables['runs']['trend_ok'].astype(bool), 'run']:
        print(f"⚠️  {run}: sup deviation does not decrease along the schedule")
    ConvergenceCharts.deviation_trend(tables['trend']).write_html(str(store.path("deviation.html")))
    ConvergenceCharts.budget_trend(tables['trend']).write_html(str(store.path("budget.html")))
    print(f"✅ report: {len(tables['combined'])} record(s) -> {store.run_dir}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Spheres with threads, tunnels and filling budgets')
    parser.add_argument('--verbose', action='store_true', help='Enable debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('net', help='Build an eps-net on S^m')
    p.add_argument('--m', type=int, default=2)
    p.add_argument('--eps', type=float, required=True)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--out', type=Path, default=OUTPUT_DIR)
    p.set_defaults(func=cmd_net)

    p = sub.add_parser('threads', help='Place endpoints and build threads for a net')
    p.add_argument('--net', type=Path, required=True)
    p.add_argument('--out', type=Path, default=OUTPUT_DIR)
    p.set_defaults(func=cmd_threads)

    p = sub.add_parser('query', help='Distance d_Y between two sphere points')
    p.add_argument('--threads', type=Path, required=True)
    p.add_argument('--x', type=str, required=True, help='comma-separated coordinates')
    p.add_argument('--y', type=str, required=True, help='comma-separated coordinates')
    p.add_argument('--dump-pairs', action='store_true', help='Write all endpoint-pair distances')
    p.add_argument('--out', type=Path, default=OUTPUT_DIR)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser('profile', help='Generate a tunnel profile')
    p.add_argument('--m', type=int, default=3)
    p.add_argument('--rho0', type=float, required=True)
    p.add_argument('--rho', type=float, required=True)
    p.add_argument('--L', type=float, required=True)
    p.add_argument('--samples', type=int, default=None)
    p.add_argument('--html', action='store_true', help='Also write a plotly chart')
    p.add_argument('--out', type=Path, default=OUTPUT_DIR)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser('budget', help='Filling budget for a profile or a thread system')
    p.add_argument('--threads', type=Path, default=None)
    p.add_argument('--profile', type=Path, default=None)
    p.add_argument('--vol', type=float, default=None, help='host volume (default: unit sphere)')
    p.add_argument('--diam', type=float, default=None, help='host diameter (default: pi)')
    p.add_argument('--rho0-factor', type=float, default=ProfileParams().rho0_factor)
    p.add_argument('--L-policy', choices=['thread', 'min'], default=ProfileParams().L_policy)
    p.add_argument('--out', type=Path, default=OUTPUT_DIR)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser('verify', help='Run the convergence suite')
    p.add_argument('--config', type=Path, default=None)
    p.add_argument('--override', type=str, default=None, help='JSON object merged over the config')
    p.add_argument('--out', type=Path, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser('report', help='Collect suite reports into tables and charts')
    p.add_argument('--runs', type=Path, default=OUTPUT_DIR)
    p.add_argument('--out', type=Path, default=OUTPUT_DIR)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its exit status"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
    )
    logger.debug(f"command {args.command}")
    try:
        return args.func(args)
    except FlatlabError as exc:
        print(f"❌ {exc}")
        return exc.exit_code


if __name__ == "__main__":
    _ensure_utf8()
    sys.exit(main())
