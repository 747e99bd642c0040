"""Command-line entry point: ``fencecut <command> [options]``.

Exit codes: 0 success, 1 domain/IO error or failed verification, 2 bad flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import isoperimetrics as iso
from . import verify as verify_mod
from .errors import FenceError
from .grid import AnnealSchedule, GridDomain, anneal_min_free_perimeter, oracle_min_free_perimeter
from .isoperimetrics import QuarterArc, Rect, StraightCut
from .polyline import OptimizerConfig, fence_points, initial_fence, optimize
from .verify import RunReport


def fmt(v: float) -> str:
    """Shortest round-trip decimal for a double, without a trailing ``.0``."""
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def describe_fence(g) -> str:
    if isinstance(g, StraightCut):
        return f"straight-cut:offset={fmt(g.offset)},length={fmt(g.length)}"
    if isinstance(g, QuarterArc):
        return (
            f"quarter-arc:corner={g.corner.value},radius={fmt(g.radius)},"
            f"length={fmt(g.length)},complement={str(g.complement).lower()}"
        )
    return f"empty:full={str(g.full).lower()}"


def fence_dict(g) -> dict:
    if isinstance(g, StraightCut):
        return {"kind": "straight-cut", "offset": g.offset, "length": g.length}
    if isinstance(g, QuarterArc):
        return {"kind": "quarter-arc", "corner": g.corner.value, "radius": g.radius,
                "length": g.length, "complement": g.complement}
    return {"kind": "empty", "full": g.full, "length": 0.0}


def curve_rows(rect: Rect, samples: int) -> list[tuple[float, float, str]]:
    """Uniform sweep over ``[0, x*y]`` plus the two regime thresholds as exact rows."""
    total = rect.area()
    areas = [float(a) for a in np.linspace(0.0, total, samples)]
    areas[-1] = total
    t = iso.quarter_disk_threshold(rect)
    areas = sorted(set(areas) | {t, total - t})
    return [(a, iso.l_star(rect, a), iso.regime(rect, a).value) for a in areas]


def write_curve(rect: Rect, samples: int, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["area", "lstar", "regime"])
    for a, v, r in curve_rows(rect, samples):
        writer.writerow([fmt(a), fmt(v), r])


def render_svg(rect: Rect, a: float) -> str:
    """SVG of the rectangle and its optimal fence.

    The long side runs horizontally; a frame point ``(u, v)`` (``u`` along
    the short side) is drawn at screen position ``(v, u)``.
    """
    X, Y = rect.x, rect.y
    value = iso.l_star(rect, a)
    g = iso.optimal_fence(rect, a)
    px = 600.0 / Y
    stroke = fmt(0.005 * Y)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{fmt(Y * px)}" '
        f'height="{fmt(X * px)}" viewBox="0 0 {fmt(Y)} {fmt(X)}">',
        f'<rect x="0" y="0" width="{fmt(Y)}" height="{fmt(X)}" fill="none" stroke="black" '
        f'stroke-width="{stroke}"/>',
    ]
    if isinstance(g, StraightCut):
        h = g.offset
        parts.append(
            f'<path d="M {fmt(h)} 0 L {fmt(h)} {fmt(X)}" fill="none" stroke="red" '
            f'stroke-width="{stroke}"/>'
        )
    elif isinstance(g, QuarterArc):
        r = g.radius
        parts.append(
            f'<path d="M 0 {fmt(r)} A {fmt(r)} {fmt(r)} 0 0 0 {fmt(r)} 0" fill="none" '
            f'stroke="red" stroke-width="{stroke}"/>'
        )
    font = fmt(0.05 * X)
    parts.append(
        f'<text x="{fmt(0.5 * Y)}" y="{fmt(0.5 * X)}" font-size="{font}" '
        f'text-anchor="middle">l* = {value:.6g}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _emit(report: RunReport, as_json: bool, text: str) -> None:
    if as_json:
        print(json.dumps(report.to_dict(), sort_keys=True))
    else:
        print(text)


def cmd_lstar(args) -> int:
    rect = Rect(args.x, args.y)
    a = iso.check_area(rect, args.area)
    value = iso.l_star(rect, a)
    r = iso.regime(rect, a)
    g = iso.optimal_fence(rect, a)
    report = RunReport("lstar", {"x": rect.x, "y": rect.y, "area": a},
                       {"lstar": value, "regime": r.value, "fence": fence_dict(g)})
    _emit(report, args.json, f"lstar={fmt(value)} regime={r.value} fence={describe_fence(g)}")
    return 0


def _write_text(path: str, text: str) -> int:
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_curve(args) -> int:
    if args.samples < 2:
        print("error: --samples must be at least 2", file=sys.stderr)
        return 1
    rect = Rect(args.x, args.y)
    buf = io.StringIO()
    write_curve(rect, args.samples, buf)
    if args.out == "-":
        sys.stdout.write(buf.getvalue())
        return 0
    rc = _write_text(args.out, buf.getvalue())
    if rc == 0 and args.json:
        print(json.dumps(RunReport("curve", {"x": rect.x, "y": rect.y, "samples": args.samples},
                                   {"path": args.out}).to_dict(), sort_keys=True))
    return rc


def cmd_render(args) -> int:
    rect = Rect(args.x, args.y)
    a = iso.check_area(rect, args.area)
    svg = render_svg(rect, a)
    if args.out == "-":
        sys.stdout.write(svg)
        return 0
    return _write_text(args.out, svg)


def _cells_text(shape) -> str:
    return ";".join(f"{c},{r}" for c, r in shape.sorted_cells())


def cmd_oracle(args) -> int:
    d = GridDomain(args.cols, args.rows, args.cell)
    start = time.perf_counter()
    value, shape = oracle_min_free_perimeter(d, args.k, cap=args.cap)
    bound = iso.l_star(d.rect(), args.k * d.cell**2)
    report = RunReport("oracle", {"cols": d.cols, "rows": d.rows, "cell": d.cell, "k": args.k},
                       {"min": value, "lstar": bound, "witness": [list(c) for c in shape.sorted_cells()]},
                       elapsed_s=time.perf_counter() - start)
    _emit(report, args.json, f"min={fmt(value)} lstar={fmt(bound)} witness={_cells_text(shape)}")
    return 0


def cmd_anneal(args) -> int:
    d = GridDomain(args.cols, args.rows, args.cell)
    schedule = AnnealSchedule(sweeps=args.sweeps, ratio=args.ratio, t0_factor=args.t0)
    start = time.perf_counter()
    value, shape = anneal_min_free_perimeter(d, args.k, seed=args.seed, schedule=schedule, init=args.init)
    bound = iso.l_star(d.rect(), args.k * d.cell**2)
    report = RunReport("anneal", {"cols": d.cols, "rows": d.rows, "cell": d.cell, "k": args.k,
                                  "sweeps": args.sweeps, "init": args.init},
                       {"min": value, "lstar": bound, "witness": [list(c) for c in shape.sorted_cells()]},
                       seed=args.seed, elapsed_s=time.perf_counter() - start)
    _emit(report, args.json, f"min={fmt(value)} lstar={fmt(bound)} cells={len(shape)}")
    return 0


def cmd_optimize(args) -> int:
    rect = Rect(args.x, args.y)
    a = iso.check_area(rect, args.area)
    cfg = OptimizerConfig(max_iter=args.max_iter, vertex_count=args.vertices, seed=args.seed)
    start = time.perf_counter()
    res = optimize(rect, a, initial_fence(rect, a, args.vertices, seed=args.seed), cfg)
    bound = iso.l_star(rect, a)
    report = RunReport(
        "optimize",
        {"x": rect.x, "y": rect.y, "area": a, "vertices": args.vertices, "max_iter": args.max_iter},
        {"length": res.length, "area": res.area, "lstar": bound, "converged": res.converged,
         "iterations": res.iterations, "fence": fence_points(res.fence, rect).tolist()},
        seed=args.seed, elapsed_s=time.perf_counter() - start,
    )
    _emit(report, args.json,
          f"length={fmt(res.length)} area={fmt(res.area)} lstar={fmt(bound)} "
          f"converged={str(res.converged).lower()} iterations={res.iterations}")
    return 0


def cmd_verify(args) -> int:
    report = verify_mod.run_checks(args.profile, args.seed)
    if args.json:
        print(json.dumps(report.to_dict(timing=not args.no_timing), sort_keys=True))
    else:
        for c in report.checks:
            print(f"{c.verdict.upper():4s} {c.name:22s} margin={c.margin:.3e} ({c.elapsed_s:.2f}s)")
        print(f"{report.outputs['passed']} passed, {report.outputs['failed']} failed")
    if not report.passed:
        failed = ", ".join(c.name for c in report.checks if not c.passed)
        print(f"failed checks: {failed}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fencecut", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def rect_args(p, area=True, json_flag=True):
        p.add_argument("--x", type=float, required=True, help="first rectangle side")
        p.add_argument("--y", type=float, required=True, help="second rectangle side")
        if area:
            p.add_argument("--area", type=float, required=True, help="enclosed area")
        if json_flag:
            p.add_argument("--json", action="store_true", help="emit a JSON report")

    def grid_args(p):
        p.add_argument("--cols", type=int, required=True)
        p.add_argument("--rows", type=int, required=True)
        p.add_argument("--cell", type=float, default=1.0)
        p.add_argument("--k", type=int, required=True, help="number of cells in the shape")
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("lstar", help="minimum free perimeter, regime and optimal fence")
    rect_args(p)
    p.set_defaults(func=cmd_lstar)

    p = sub.add_parser("curve", help="CSV sweep of l* over [0, x*y]")
    rect_args(p, area=False)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("render", help="SVG of the rectangle and optimal fence")
    rect_args(p, json_flag=False)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("oracle", help="exact grid minimum by enumeration")
    grid_args(p)
    p.add_argument("--cap", type=int, default=24)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("anneal", help="simulated-annealing grid upper bound")
    grid_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweeps", type=int, default=200)
    p.add_argument("--ratio", type=float, default=0.995)
    p.add_argument("--t0", type=float, default=2.0, help="initial temperature in cell units")
    p.add_argument("--init", choices=("constructive", "random"), default="constructive")
    p.set_defaults(func=cmd_anneal)

    p = sub.add_parser("optimize", help="polyline fence length minimisation")
    rect_args(p)
    p.add_argument("--vertices", type=int, default=32)
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", help="run the verification campaigns")
    p.add_argument("--profile", choices=sorted(verify_mod.PROFILES), default="quick")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--no-timing", action="store_true", help="omit timing fields from JSON")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
