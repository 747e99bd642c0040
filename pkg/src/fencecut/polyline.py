"""Polygonal fences with sliding border endpoints, and a length minimiser at
fixed enclosed area.

A fence starts at border position ``t_start``, visits the interior vertices
in order and ends at border position ``t_end``. Border positions are arc
length measured counter-clockwise from the origin corner of the frame
``[0, x] x [0, y]``. The *forward* region is bounded by the fence followed by
the border walked counter-clockwise from ``t_end`` back to ``t_start``; the
*backward* region is the rest of the rectangle.

The minimiser is an augmented Lagrangian method: an outer loop updates the
area multiplier and penalty, an inner loop runs L-BFGS with a backtracking
line search that halves the step whenever a trial point leaves the
rectangle or makes the loop self-intersect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, GeometryError
from .isoperimetrics import Rect, Regime, check_area, l_star, regime

__all__ = [
    "FencePolyline",
    "OptimizerConfig",
    "OptimizeResult",
    "border_point",
    "border_tangent",
    "border_param",
    "fence_points",
    "loop_points",
    "fence_length",
    "enclosed_area",
    "gradients",
    "loop_is_simple",
    "resample",
    "straight_cut_init",
    "corner_init",
    "initial_fence",
    "optimize",
    "multi_start",
]


def _corner_params(rect: Rect) -> tuple[float, float, float, float]:
    return (0.0, rect.x, rect.x + rect.y, 2.0 * rect.x + rect.y)


def border_point(t: float, rect: Rect) -> np.ndarray:
    """Point on the border at counter-clockwise arc length ``t`` from the origin."""
    x, y = rect.x, rect.y
    t = t % rect.perimeter
    if t < x:
        return np.array([t, 0.0])
    if t < x + y:
        return np.array([x, t - x])
    if t < 2 * x + y:
        return np.array([x - (t - x - y), y])
    return np.array([0.0, y - (t - 2 * x - y)])


_SIDE_TANGENTS = (np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([-1.0, 0.0]), np.array([0.0, -1.0]))


def border_tangent(t: float, rect: Rect) -> np.ndarray:
    """Unit counter-clockwise tangent; exactly at a corner, the mean of both sides."""
    t = t % rect.perimeter
    corners = _corner_params(rect)
    for i, c in enumerate(corners):
        if t == c:
            return 0.5 * (_SIDE_TANGENTS[i - 1] + _SIDE_TANGENTS[i])
    side = sum(1 for c in corners[1:] if t > c)
    return _SIDE_TANGENTS[side].copy()


def border_param(p, rect: Rect, tol: float | None = None) -> float:
    """Inverse of :func:`border_point` for a point on the border."""
    x, y = rect.x, rect.y
    tol = 1e-9 * y if tol is None else tol
    px, py = float(p[0]), float(p[1])
    if abs(py) <= tol and -tol <= px < x:
        return max(px, 0.0)
    if abs(px - x) <= tol and -tol <= py < y:
        return x + max(py, 0.0)
    if abs(py - y) <= tol and 0 < px <= x + tol:
        return x + y + (x - min(px, x))
    if abs(px) <= tol and 0 < py <= y + tol:
        return 2 * x + y + (y - min(py, y))
    raise DomainError(f"point ({px}, {py}) is not on the rectangle border")


@dataclass
class FencePolyline:
    t_start: float
    t_end: float
    interior: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self):
        self.t_start = float(self.t_start)
        self.t_end = float(self.t_end)
        self.interior = np.asarray(self.interior, dtype=float).reshape(-1, 2)

    @property
    def n_interior(self) -> int:
        return len(self.interior)

    def to_vector(self) -> np.ndarray:
        return np.concatenate(([self.t_start, self.t_end], self.interior.ravel()))

    @classmethod
    def from_vector(cls, z: np.ndarray) -> "FencePolyline":
        return cls(z[0], z[1], np.asarray(z[2:]).reshape(-1, 2))

    def copy(self) -> "FencePolyline":
        return FencePolyline(self.t_start, self.t_end, self.interior.copy())


def fence_points(f: FencePolyline, rect: Rect) -> np.ndarray:
    """Fence vertices from the start endpoint to the end endpoint."""
    return np.vstack([border_point(f.t_start, rect), f.interior, border_point(f.t_end, rect)])


def _corners_between(t_from: float, t_to: float, rect: Rect) -> list[np.ndarray]:
    """Corners strictly inside the counter-clockwise border walk from ``t_from`` to ``t_to``."""
    per = rect.perimeter
    span = (t_to - t_from) % per
    out = []
    for c in sorted(_corner_params(rect), key=lambda c: (c - t_from) % per):
        d = (c - t_from) % per
        if 0 < d < span:
            out.append((d, border_point(c, rect)))
    return [p for _, p in sorted(out, key=lambda e: e[0])]


def loop_points(f: FencePolyline, rect: Rect, forward: bool = True) -> np.ndarray:
    """Closed counter-clockwise loop around the forward (or backward) region."""
    pts = fence_points(f, rect)
    if forward:
        corners = _corners_between(f.t_end, f.t_start, rect)
        path = [pts] + ([np.array(corners)] if corners else [])
    else:
        corners = _corners_between(f.t_start, f.t_end, rect)
        path = [pts[::-1]] + ([np.array(corners)] if corners else [])
    return np.vstack(path)


def _shoelace(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def loop_is_simple(pts: np.ndarray) -> bool:
    """Vectorised self-intersection test for a closed loop."""
    m = len(pts)
    if m < 3:
        return False
    a = pts
    b = np.roll(pts, -1, axis=0)
    seg = b - a
    if np.any(np.all(seg == 0, axis=1)):
        return False

    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])

    A1, B1 = a[:, None, :], b[:, None, :]
    A2, B2 = a[None, :, :], b[None, :, :]
    d1 = orient(A2, B2, A1)
    d2 = orient(A2, B2, B1)
    d3 = orient(A1, B1, A2)
    d4 = orient(A1, B1, B2)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)

    def within(p, q, r):
        return (
            (np.minimum(p[..., 0], q[..., 0]) <= r[..., 0])
            & (r[..., 0] <= np.maximum(p[..., 0], q[..., 0]))
            & (np.minimum(p[..., 1], q[..., 1]) <= r[..., 1])
            & (r[..., 1] <= np.maximum(p[..., 1], q[..., 1]))
        )

    touch = (
        ((d1 == 0) & within(A2, B2, A1))
        | ((d2 == 0) & within(A2, B2, B1))
        | ((d3 == 0) & within(A1, B1, A2))
        | ((d4 == 0) & within(A1, B1, B2))
    )
    hit = proper | touch
    i, j = np.triu_indices(m, k=1)
    nonadjacent = (j != i + 1) & ~((i == 0) & (j == m - 1))
    if np.any(hit[i[nonadjacent], j[nonadjacent]]):
        return False
    # consecutive segments must not fold back onto each other
    cross = seg[:, 0] * np.roll(seg, -1, axis=0)[:, 1] - seg[:, 1] * np.roll(seg, -1, axis=0)[:, 0]
    dot = np.einsum("ij,ij->i", seg, np.roll(seg, -1, axis=0))
    return not np.any((cross == 0) & (dot < 0))


def fence_length(f: FencePolyline, rect: Rect) -> float:
    pts = fence_points(f, rect)
    return float(np.sum(np.hypot(*np.diff(pts, axis=0).T)))


def enclosed_area(f: FencePolyline, rect: Rect, forward: bool = True, check: bool = True) -> float:
    """Shoelace area of the forward (default) or backward region.

    Raises :class:`GeometryError` when the loop self-intersects, unless
    ``check`` is false.
    """
    pts = loop_points(f, rect, forward)
    if check and not loop_is_simple(pts):
        raise GeometryError("fence loop self-intersects")
    return _shoelace(pts)


def gradients(f: FencePolyline, rect: Rect) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of fence length and forward area in :meth:`FencePolyline.to_vector` order."""
    pts = fence_points(f, rect)
    n = f.n_interior
    seg = np.diff(pts, axis=0)
    lens = np.hypot(seg[:, 0], seg[:, 1])
    unit = seg / np.where(lens > 0, lens, 1.0)[:, None]
    # d(length)/d(vertex j) = u_{j-1} - u_j
    g_pts = np.zeros_like(pts)
    g_pts[1:] += unit
    g_pts[:-1] -= unit

    loop = loop_points(f, rect, forward=True)
    nxt = np.roll(loop, -1, axis=0)
    prv = np.roll(loop, 1, axis=0)
    a_loop = 0.5 * np.column_stack((nxt[:, 1] - prv[:, 1], prv[:, 0] - nxt[:, 0]))
    a_pts = a_loop[: n + 2]

    ts_tan = border_tangent(f.t_start, rect)
    te_tan = border_tangent(f.t_end, rect)
    g_len = np.empty(2 + 2 * n)
    g_area = np.empty(2 + 2 * n)
    g_len[0] = g_pts[0] @ ts_tan
    g_len[1] = g_pts[-1] @ te_tan
    g_len[2:] = g_pts[1:-1].ravel()
    g_area[0] = a_pts[0] @ ts_tan
    g_area[1] = a_pts[-1] @ te_tan
    g_area[2:] = a_pts[1:-1].ravel()
    return g_len, g_area


def resample(f: FencePolyline, rect: Rect, n_interior: int) -> FencePolyline:
    """Same fence path with ``n_interior`` vertices spaced evenly by arc length."""
    pts = fence_points(f, rect)
    cum = np.concatenate(([0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))))
    s = np.linspace(0.0, cum[-1], n_interior + 2)[1:-1]
    new = np.column_stack((np.interp(s, cum, pts[:, 0]), np.interp(s, cum, pts[:, 1])))
    return FencePolyline(f.t_start, f.t_end, new)


def straight_cut_init(
    rect: Rect, a: float, n_interior: int, seed: int | None = None, amplitude: float = 0.05
) -> FencePolyline:
    """Cut parallel to the short side enclosing ``a`` on the origin side.

    With a ``seed``, interior vertices are jittered vertically by up to
    ``amplitude * x`` (clipped to stay inside the rectangle).
    """
    a = check_area(rect, a)
    h = a / rect.x
    if not 0 < h < rect.y:
        raise DomainError("straight cut needs 0 < a < x*y")
    xs = rect.x * (1.0 - np.arange(1, n_interior + 1) / (n_interior + 1))
    ys = np.full(n_interior, h)
    if seed is not None and n_interior:
        rng = np.random.default_rng(seed)
        ys = ys + rng.uniform(-amplitude, amplitude, n_interior) * rect.x
        margin = 1e-3 * rect.x
        ys = np.clip(ys, margin, rect.y - margin)
    return FencePolyline(rect.x + h, 2 * rect.x + 2 * rect.y - h, np.column_stack((xs, ys)))


def corner_init(
    rect: Rect, a: float, n_interior: int, complement: bool = False, seed: int | None = None,
    amplitude: float = 0.02,
) -> FencePolyline:
    """Right-angle fence around a square of area ``a`` at the origin corner.

    With ``complement=True`` the square of area ``x*y - a`` sits at the far
    corner and the forward region is everything else.
    """
    a = check_area(rect, a)
    x, y = rect.x, rect.y
    side = math.sqrt(rect.area() - a if complement else a)
    if not 0 < side < x:
        raise DomainError("corner fence needs a square smaller than the short side")
    if complement:
        f = FencePolyline(x + y - side, x + y + side, [[x - side, y - side]])
    else:
        f = FencePolyline(side, 2 * x + 2 * y - side, [[side, side]])
    f = resample(f, rect, n_interior)
    if seed is not None and n_interior:
        rng = np.random.default_rng(seed)
        jitter = rng.uniform(-amplitude, amplitude, f.interior.shape) * side
        f.interior = np.clip(f.interior + jitter, 1e-3 * x, [x - 1e-3 * x, y - 1e-3 * x])
    return f


def initial_fence(rect: Rect, a: float, n_interior: int, seed: int | None = None) -> FencePolyline:
    """Initializer matched to the regime of ``a``."""
    r = regime(rect, a)
    if r is Regime.STRAIGHT_CUT:
        return straight_cut_init(rect, a, n_interior, seed)
    return corner_init(rect, a, n_interior, complement=r is Regime.COMPLEMENT_QUARTER_DISK, seed=seed)


@dataclass(frozen=True)
class OptimizerConfig:
    max_iter: int = 5000
    step: float = 0.01
    penalty_init: float = 100.0
    penalty_growth: float = 2.0
    penalty_cap: float = 1e6
    tol_area: float = 1e-9
    tol_grad: float = 1e-5
    seed: int = 0
    vertex_count: int = 32
    inner_iter: int = 200
    memory: int = 20

    def __post_init__(self):
        for name in ("max_iter", "step", "penalty_init", "penalty_growth", "tol_area", "tol_grad", "vertex_count", "inner_iter", "memory"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if not (self.tol_area < 1 and self.tol_grad < 1):
            raise DomainError("tolerances must lie in (0, 1)")


@dataclass
class OptimizeResult:
    fence: FencePolyline
    length: float
    area: float
    converged: bool
    iterations: int
    multiplier: float
    projected_grad: float
    min_bound_ratio: float
    trace: list = field(default_factory=list, repr=False)

    def __iter__(self):
        return iter((self.fence, self.length, self.area, self.converged, self.iterations))


def _feasible(z: np.ndarray, rect: Rect, n: int) -> bool:
    pts = z[2:].reshape(-1, 2)
    if n and (
        np.any(pts <= 0.0) or np.any(pts[:, 0] >= rect.x) or np.any(pts[:, 1] >= rect.y)
    ):
        return False
    f = FencePolyline.from_vector(z)
    return loop_is_simple(loop_points(f, rect))


def _wrap(z: np.ndarray, rect: Rect) -> np.ndarray:
    z = z.copy()
    z[:2] = np.mod(z[:2], rect.perimeter)
    return z


def _merge_close(f: FencePolyline, rect: Rect, eps: float) -> FencePolyline:
    pts = fence_points(f, rect)
    keep = [pts[0]]
    for p in pts[1:-1]:
        if np.hypot(*(p - keep[-1])) >= eps:
            keep.append(p)
    interior = keep[1:]
    end = pts[-1]
    while interior and np.hypot(*(interior[-1] - end)) < eps:
        interior.pop()
    return FencePolyline(f.t_start, f.t_end, np.array(interior).reshape(-1, 2))


def _projected_grad(g_len: np.ndarray, g_area: np.ndarray) -> float:
    denom = float(g_area @ g_area)
    if denom == 0:
        return float(np.linalg.norm(g_len))
    return float(np.linalg.norm(g_len - (g_len @ g_area) / denom * g_area))


def optimize(
    rect: Rect, a: float, init: FencePolyline, cfg: OptimizerConfig | None = None
) -> OptimizeResult:
    """Minimise fence length subject to the forward region having area ``a``.

    ``init`` is resampled to ``cfg.vertex_count`` interior vertices if its
    count differs. Converged means the relative area error is within
    ``tol_area`` and the length gradient projected off the area gradient has
    norm at most ``tol_grad``. Step underflow or exhausting ``max_iter``
    returns the last accepted iterate with ``converged=False``.
    """
    cfg = cfg or OptimizerConfig()
    a = check_area(rect, a)
    if not 0 < a < rect.area():
        raise DomainError("target area must lie strictly between 0 and x*y")
    f = init.copy()
    if f.n_interior != cfg.vertex_count:
        f = resample(f, rect, cfg.vertex_count)
    z = _wrap(f.to_vector(), rect)
    if not _feasible(z, rect, f.n_interior):
        raise GeometryError("initial fence loop is not simple or leaves the rectangle")

    total = rect.area()
    eps_merge = 1e-6 * rect.x
    lam = 0.0
    mu = cfg.penalty_init
    iterations = 0
    min_ratio = math.inf
    trace = []

    def evaluate(zv):
        fv = FencePolyline.from_vector(zv)
        length = fence_length(fv, rect)
        area = _shoelace(loop_points(fv, rect))
        gl, ga = gradients(fv, rect)
        return length, area, gl, ga

    def record(length, area):
        nonlocal min_ratio
        bound = l_star(rect, min(max(area, 0.0), total))
        if bound > 0:
            min_ratio = min(min_ratio, length / bound)
        trace.append((length, area))

    length, area, gl, ga = evaluate(z)
    record(length, area)
    converged = False
    stalled = False
    prev_violation = math.inf

    def line_search(z, d, phi, grad, n, merit):
        slope = float(grad @ d)
        alpha = 1.0
        while alpha * float(np.max(np.abs(d))) > 1e-15 * rect.y:
            z_try = _wrap(z + alpha * d, rect)
            if _feasible(z_try, rect, n):
                l_t, a_t, gl_t, ga_t = evaluate(z_try)
                phi_t = merit(l_t, a_t)
                if phi_t <= phi + 1e-4 * alpha * slope:
                    return alpha, z_try, l_t, a_t, gl_t, ga_t, phi_t
            alpha *= 0.5
        return None

    stalls = 0
    while iterations < cfg.max_iter and stalls < 3:
        n = (len(z) - 2) // 2
        stalled = False

        def merit(length, area):
            c = area - a
            return length + lam * c + 0.5 * mu * c * c

        phi = merit(length, area)
        grad = gl + (lam + mu * (area - a)) * ga
        s_hist, y_hist = [], []
        first = True
        for _ in range(cfg.inner_iter):
            if iterations >= cfg.max_iter:
                break
            gnorm = float(np.linalg.norm(grad))
            if gnorm <= 0.1 * cfg.tol_grad:
                break
            # two-loop recursion
            q = grad.copy()
            alphas = []
            for s, yv in reversed(list(zip(s_hist, y_hist))):
                rho = 1.0 / float(yv @ s)
                al = rho * float(s @ q)
                alphas.append(al)
                q -= al * yv
            if s_hist:
                s, yv = s_hist[-1], y_hist[-1]
                q *= float(s @ yv) / float(yv @ yv)
            elif first:
                q *= cfg.step / gnorm
            for (s, yv), al in zip(zip(s_hist, y_hist), reversed(alphas)):
                rho = 1.0 / float(yv @ s)
                be = rho * float(yv @ q)
                q += s * (al - be)
            d = -q
            if float(grad @ d) >= 0:
                d = -grad * (cfg.step / gnorm)
                s_hist.clear()
                y_hist.clear()
            first = False
            trial = line_search(z, d, phi, grad, n, merit)
            if trial is None and s_hist:
                # quasi-Newton direction failed; retry along steepest descent
                s_hist.clear()
                y_hist.clear()
                d = -grad * (cfg.step / gnorm)
                trial = line_search(z, d, phi, grad, n, merit)
            iterations += 1
            if trial is None:
                stalled = True
                break
            alpha, z_try, l_t, a_t, gl_t, ga_t, phi_t = trial
            grad_t = gl_t + (lam + mu * (a_t - a)) * ga_t
            step_vec = alpha * d
            yv = grad_t - grad
            if float(yv @ step_vec) > 1e-12 * float(np.linalg.norm(yv)) * float(np.linalg.norm(step_vec)):
                s_hist.append(step_vec)
                y_hist.append(yv)
                if len(s_hist) > cfg.memory:
                    s_hist.pop(0)
                    y_hist.pop(0)
            z, length, area, gl, ga, phi, grad = z_try, l_t, a_t, gl_t, ga_t, phi_t, grad_t
            record(length, area)

        c = area - a
        if stalled and abs(c) / total > cfg.tol_area:
            # Newton restoration step along the area gradient
            z_try = _wrap(z - c / float(ga @ ga) * ga, rect)
            if _feasible(z_try, rect, n):
                l_t, a_t, gl_t, ga_t = evaluate(z_try)
                if abs(a_t - a) < abs(c):
                    z, length, area, gl, ga = z_try, l_t, a_t, gl_t, ga_t
                    record(length, area)
                    c = area - a
        pg = _projected_grad(gl, ga)
        if abs(c) / total <= cfg.tol_area and pg <= cfg.tol_grad:
            converged = True
            break
        stalls = stalls + 1 if stalled else 0
        lam += mu * c
        if abs(c) > 0.25 * prev_violation:
            mu = min(mu * cfg.penalty_growth, cfg.penalty_cap)
        prev_violation = abs(c)
        merged = _merge_close(FencePolyline.from_vector(z), rect, eps_merge)
        if merged.n_interior != n:
            z = merged.to_vector()
            length, area, gl, ga = evaluate(z)

    fence = FencePolyline.from_vector(z)
    return OptimizeResult(
        fence=fence,
        length=length,
        area=area,
        converged=converged,
        iterations=iterations,
        multiplier=lam,
        projected_grad=_projected_grad(gl, ga),
        min_bound_ratio=min_ratio,
        trace=trace,
    )


def multi_start(
    rect: Rect, a: float, seeds, cfg: OptimizerConfig | None = None
) -> tuple[int, OptimizeResult]:
    """Run :func:`optimize` from seeded initializers; keep the shortest, lowest seed on ties."""
    cfg = cfg or OptimizerConfig()
    best = None
    for seed in sorted(seeds):
        init = initial_fence(rect, a, cfg.vertex_count, seed=seed)
        res = optimize(rect, a, init, replace(cfg, seed=seed))
        if best is None or res.length < best[1].length:
            best = (seed, res)
    if best is None:
        raise DomainError("multi_start needs at least one seed")
    return best
