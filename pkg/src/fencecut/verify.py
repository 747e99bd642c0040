"""Verification campaigns run by ``fencecut verify``.

Each check returns a :class:`Check` with a pass/fail verdict and a margin
(how far the worst observed value sits from its tolerance; negative means
failure). Checks draw randomness from their own ``numpy`` generators seeded
from the campaign seed, so reports are reproducible.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import isoperimetrics as iso
from .grid import (
    GridDomain,
    anneal_min_free_perimeter,
    complement_components,
    grid_free_perimeter,
    grid_touch_class,
    oracle_min_free_perimeter,
    random_connected_shape,
)
from .isoperimetrics import Rect, SubareaPartition, TouchClass
from .polyline import (
    FencePolyline,
    OptimizerConfig,
    border_point,
    enclosed_area,
    fence_length,
    gradients,
    initial_fence,
    loop_is_simple,
    loop_points,
    optimize,
)
from .reflections import (
    Line,
    Polygon,
    free_perimeter_polygon,
    reflect_half_plane,
    reflect_quarter_plane,
    regular_arc_polygon,
)

PROFILES = {
    "quick": {"rects": 100, "samples": 10_000, "shapes": 2_000, "partitions": 2_000, "configs": 100},
    "full": {"rects": 100, "samples": 10_000, "shapes": 10_000, "partitions": 10_000, "configs": 100},
}


@dataclass
class Check:
    name: str
    passed: bool
    margin: float
    detail: dict = field(default_factory=dict)
    elapsed_s: float = 0.0

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass
class RunReport:
    command: str
    inputs: dict
    outputs: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    seed: int | None = None
    elapsed_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "seed": self.seed,
            "checks": [],
        }
        for c in self.checks:
            entry = {"name": c.name, "verdict": c.verdict, "margin": c.margin, "detail": c.detail}
            if timing:
                entry["elapsed_s"] = c.elapsed_s
            d["checks"].append(entry)
        if self.checks:
            d["verdict"] = "pass" if self.passed else "fail"
        if timing:
            d["elapsed_s"] = self.elapsed_s
        return d


def _random_rects(rng: np.random.Generator, count: int) -> list[Rect]:
    sides = rng.uniform(0.1, 10.0, size=(count, 2))
    return [Rect(float(a), float(b)) for a, b in sides]


def check_half_area(rng, scale, lstar):
    worst = abs(lstar(Rect(1, 2), 1.0) - 1.0)
    exact = lstar(Rect(1, 2), 1.0) == 1.0
    for r in _random_rects(rng, scale["rects"]):
        worst = max(worst, abs(lstar(r, 0.5 * r.area()) - r.x) / r.x)
    return exact and worst <= 1e-12, 1e-12 - worst, {"max_rel_err": worst}


def check_continuity(rng, scale, lstar):
    worst = 0.0
    for r in _random_rects(rng, scale["rects"]):
        t = iso.quarter_disk_threshold(r)
        for a in (t, r.area() - t):
            worst = max(worst, abs(lstar(r, a) - r.x) / r.x)
    return worst <= 1e-12, 1e-12 - worst, {"max_rel_err": worst}


def check_symmetry(rng, scale, lstar):
    worst = 0.0
    rects = _random_rects(rng, 10)
    per = scale["samples"] // len(rects)
    for r in rects:
        for a in rng.uniform(0.0, r.area(), per):
            a = float(a)
            worst = max(worst, abs(lstar(r, a) - lstar(r, r.area() - a)) / r.x)
    return worst <= 1e-12, 1e-12 - worst, {"max_rel_err": worst}


def check_bound_ratios(rng, scale, lstar):
    worst = 0.0
    for a in rng.uniform(1e-6, 1e3, scale["rects"]):
        a = float(a)
        p, h, q = iso.iso_lower_plane(a), iso.iso_lower_half_plane(a), iso.iso_lower_quarter_plane(a)
        worst = max(worst, abs(p / q - 2.0) / 2.0, abs(h / q - math.sqrt(2.0)) / math.sqrt(2.0))
        if not q < h < p:
            worst = math.inf
    return worst <= 1e-12, 1e-12 - worst, {"max_rel_err": worst}


def check_dominance(rng, scale, lstar):
    """min of the six touch-class bounds <= l* <= x."""
    worst = -math.inf
    for r in _random_rects(rng, 20):
        for a in np.linspace(0.0, r.area(), 101):
            a = min(float(a), r.area())
            v = lstar(r, a)
            floor = min(iso.case_lower_bound(tc, r, a) for tc in TouchClass)
            worst = max(worst, (floor - v) / r.x, (v - r.x) / r.x)
    return worst <= 1e-12, 1e-12 - worst, {"max_violation": worst}


def check_grid_bracketing(rng, scale, lstar):
    d = GridDomain(3, 4, 1.0)
    rect = d.rect()
    values = {}
    margin = math.inf
    ok = True
    for k in range(d.size + 1):
        v, _ = oracle_min_free_perimeter(d, k)
        values[str(k)] = v
        margin = min(margin, v - lstar(rect, k) + 1e-9)
    for k in (3, 6, 9):
        ok &= values[str(k)] == 3.0 and abs(lstar(rect, k) - 3.0) <= 1e-12
    return ok and margin >= 0, margin, {"oracle": values}


def _random_shapes(seed: int, count: int):
    d = GridDomain(5, 6, 1.0)
    rnd = random.Random(seed)
    for _ in range(count):
        yield d, random_connected_shape(d, rnd.randint(1, d.size), rnd)


def check_case_bounds(rng, scale, lstar, seed=0):
    margin = math.inf
    for d, g in _random_shapes(seed, scale["shapes"]):
        fp = grid_free_perimeter(g, d)
        bound = iso.case_lower_bound(grid_touch_class(g, d), d.rect(), g.area(d))
        margin = min(margin, fp - bound + 1e-9, fp - lstar(d.rect(), g.area(d)) + 1e-9)
    return margin >= 0, margin, {"shapes": scale["shapes"]}


def check_complement_identity(rng, scale, lstar, seed=0):
    mismatches = 0
    for d, g in _random_shapes(seed, scale["shapes"]):
        total = sum(grid_free_perimeter(c, d) for c in complement_components(g, d))
        mismatches += total != grid_free_perimeter(g, d)
    return mismatches == 0, 0.0 if mismatches == 0 else -float(mismatches), {"mismatches": mismatches}


def check_sqrt_sum(rng, scale, lstar):
    margin = math.inf
    equality_ok = True
    for i in range(scale["partitions"]):
        k = int(rng.integers(1, 17))
        total = float(rng.uniform(0.01, 100.0))
        if i % 10 == 0:
            parts = np.full(k, total / k)
        else:
            parts = rng.dirichlet(np.ones(k)) * total
            parts = np.maximum(parts, 1e-12)
        p = SubareaPartition(parts)
        s = iso.sum_sqrt_lower(p)
        hi = iso.max_sum_sqrt(k, p.total)
        lo = math.sqrt(p.total)
        margin = min(margin, s - lo + 1e-9 * hi, hi - s + 1e-9 * hi)
        equal = bool(np.allclose(parts, parts.mean(), rtol=1e-9, atol=0))
        at_max = abs(hi - s) <= 1e-9 * hi
        if equal != at_max:
            equality_ok = False
    return margin >= 0 and equality_ok, margin, {"equality_iff_equal_parts": equality_ok}


def check_optimizer(rng, scale, lstar, seed=0):
    rect = Rect(1, 2)
    cfg = OptimizerConfig(vertex_count=32, max_iter=5000, seed=seed)
    detail = {}
    margin = math.inf
    ok = True
    for a in (0.25, 1.0, 1.9):
        res = optimize(rect, a, initial_fence(rect, a, 32, seed=seed), cfg)
        target = lstar(rect, a)
        rel = abs(res.length - target) / target
        detail[repr(a)] = {
            "length": res.length,
            "lstar": target,
            "rel_err": rel,
            "iterations": res.iterations,
            "converged": res.converged,
            "min_bound_ratio": res.min_bound_ratio,
        }
        margin = min(margin, 0.01 - rel, res.min_bound_ratio - (1 - 1e-9))
        ok &= rel <= 0.01 and res.iterations <= 5000 and res.min_bound_ratio >= 1 - 1e-9
    return ok and margin >= 0, margin, detail


def random_fence(rng: np.random.Generator, rect: Rect, n: int) -> FencePolyline:
    """Random simple fence: a straight chord between two sides, jittered.

    Border parameters stay away from the corners.
    """
    per = rect.perimeter
    corners = np.array([0.0, rect.x, rect.x + rect.y, 2 * rect.x + rect.y, per])
    lo = 0.05 * rect.x
    while True:
        ts, te = rng.uniform(0.0, per, 2)
        if np.min(np.abs(corners - ts)) < lo or np.min(np.abs(corners - te)) < lo:
            continue
        p, q = border_point(ts, rect), border_point(te, rect)
        if np.hypot(*(p - q)) < 0.2 * rect.x:
            continue
        # a chord along one side would lie on the border
        if any(p[i] == q[i] and p[i] in (0.0, side) for i, side in ((0, rect.x), (1, rect.y))):
            continue
        s = np.linspace(0, 1, n + 2)[1:-1, None]
        pts = p + s * (q - p)
        normal = np.array([-(q - p)[1], (q - p)[0]]) / np.hypot(*(q - p))
        pts = pts + rng.uniform(-0.05, 0.05, (n, 1)) * rect.x * normal
        pts = pts + rng.uniform(-0.01, 0.01, (n, 2)) * rect.x
        if np.any(pts <= 0) or np.any(pts[:, 0] >= rect.x) or np.any(pts[:, 1] >= rect.y):
            continue
        f = FencePolyline(ts, te, pts)
        if loop_is_simple(loop_points(f, rect)):
            return f


def finite_difference_gradients(f: FencePolyline, rect: Rect, h: float):
    z = f.to_vector()
    g_len = np.empty_like(z)
    g_area = np.empty_like(z)
    for i in range(len(z)):
        zp, zm = z.copy(), z.copy()
        zp[i] += h
        zm[i] -= h
        fp, fm = FencePolyline.from_vector(zp), FencePolyline.from_vector(zm)
        g_len[i] = (fence_length(fp, rect) - fence_length(fm, rect)) / (2 * h)
        g_area[i] = (enclosed_area(fp, rect, check=False) - enclosed_area(fm, rect, check=False)) / (2 * h)
    return g_len, g_area


def check_gradients(rng, scale, lstar):
    worst = 0.0
    rects = [Rect(1, 2), Rect(1, 1), Rect(0.7, 3.0)]
    for i in range(scale["configs"]):
        rect = rects[i % len(rects)]
        f = random_fence(rng, rect, int(rng.integers(0, 12)))
        gl, ga = gradients(f, rect)
        fl, fa = finite_difference_gradients(f, rect, 1e-6 * rect.x)
        for g, fd in ((gl, fl), (ga, fa)):
            worst = max(worst, float(np.linalg.norm(g - fd) / max(np.linalg.norm(fd), 1e-300)))
    return worst <= 1e-6, 1e-6 - worst, {"max_rel_err": worst}


def reflection_test_polygons():
    """Polygons with a contact edge on the x-axis, used for the doubling check."""
    return [
        Polygon([(0, 0), (1, 0), (1, 1), (0, 1)]),
        Polygon([(0, 0), (1, 0), (0, 1)]),
        Polygon([(0, 0), (2, 0), (2, 1), (1.5, 0.4), (1, 2), (0.2, 0.7)]),
        Polygon([(-1.0, 0.0)] + [(math.cos(t), math.sin(t)) for t in np.linspace(0, math.pi, 63)[:-1]]),
    ]


def check_reflections(rng, scale, lstar):
    worst = 0.0
    axis = Line((0.0, 0.0), (1.0, 0.0))
    for p in reflection_test_polygons():
        worst = max(worst, abs(reflect_half_plane(p, axis).area - 2 * p.area) / (2 * p.area))
    corner_polys = [
        Polygon([(0, 0), (1, 0), (1, 1), (0, 1)]),
        Polygon([(0, 0), (1, 0), (1, 2), (0, 2)]),
        regular_arc_polygon(1.0, 64),
    ]
    for p in corner_polys:
        q = reflect_quarter_plane(p, (0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
        worst = max(worst, abs(q.area - 4 * p.area) / (4 * p.area))
    arc = regular_arc_polygon(1.0, 64)
    fp = free_perimeter_polygon(arc, Rect(2.0, 2.0))
    arc_err = abs(fp - 0.5 * math.pi) / (0.5 * math.pi)
    ok = worst <= 1e-12 and arc_err <= 1e-3
    return ok, min(1e-12 - worst, 1e-3 - arc_err), {"max_area_rel_err": worst, "arc_rel_err": arc_err}


def check_anneal_consistency(rng, scale, lstar, seed=0):
    domains = [GridDomain(2, 2), GridDomain(3, 3), GridDomain(3, 4), GridDomain(2, 5)]
    mismatches = []
    margin = math.inf
    for d in domains:
        for k in range(d.size + 1):
            exact, _ = oracle_min_free_perimeter(d, k)
            approx, shape = anneal_min_free_perimeter(d, k, seed=seed)
            margin = min(margin, approx - exact, approx - lstar(d.rect(), k) + 1e-9)
            if approx != exact:
                mismatches.append(f"{d.cols}x{d.rows}:k={k}")
    return margin >= 0 and not mismatches, margin if not mismatches else -1.0, {"mismatches": mismatches}


CHECKS: list[tuple[str, Callable]] = [
    ("half-area", check_half_area),
    ("continuity", check_continuity),
    ("symmetry", check_symmetry),
    ("bound-ratios", check_bound_ratios),
    ("dominance", check_dominance),
    ("grid-bracketing", check_grid_bracketing),
    ("case-bounds", check_case_bounds),
    ("complement-identity", check_complement_identity),
    ("sqrt-sum", check_sqrt_sum),
    ("optimizer", check_optimizer),
    ("gradients", check_gradients),
    ("reflections", check_reflections),
    ("anneal-consistency", check_anneal_consistency),
]

_SEEDED = {"case-bounds", "complement-identity", "optimizer", "anneal-consistency"}


def run_checks(profile: str = "quick", seed: int = 0, lstar: Callable | None = None, only=None) -> RunReport:
    """Run every check (or those named in ``only``) and collect a report."""
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}")
    lstar = lstar or iso.l_star
    scale = PROFILES[profile]
    report = RunReport(command="verify", inputs={"profile": profile}, seed=seed)
    start = time.perf_counter()
    for index, (name, fn) in enumerate(CHECKS):
        if only and name not in only:
            continue
        rng = np.random.default_rng([seed, index])
        t0 = time.perf_counter()
        kwargs = {"seed": seed} if name in _SEEDED else {}
        passed, margin, detail = fn(rng, scale, lstar, **kwargs)
        report.checks.append(
            Check(name, bool(passed), float(margin), detail, time.perf_counter() - t0)
        )
    report.elapsed_s = time.perf_counter() - start
    report.outputs = {"passed": sum(c.passed for c in report.checks), "failed": sum(not c.passed for c in report.checks)}
    return report
