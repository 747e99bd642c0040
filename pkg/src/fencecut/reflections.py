"""Simple polygons, mirror unions across half-plane and quarter-plane boundaries,
and free-perimeter measurement against a rectangle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, GeometryError, UnsupportedInputError
from .isoperimetrics import Rect, TouchClass

__all__ = [
    "Polygon",
    "Line",
    "signed_area",
    "segments_intersect",
    "is_simple",
    "length_off_line",
    "reflect_half_plane",
    "reflect_quarter_plane",
    "free_perimeter_polygon",
    "touch_class_polygon",
    "border_contact",
    "regular_arc_polygon",
]

Point = tuple[float, float]


def signed_area(points: Sequence[Point]) -> float:
    """Shoelace area, positive for counter-clockwise order."""
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a: Point, b: Point, c: Point) -> bool:
    return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])


def segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    """True if closed segments ``p1p2`` and ``q1q2`` share at least one point."""
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(q1, q2, p1):
        return True
    if d2 == 0 and _on_segment(q1, q2, p2):
        return True
    if d3 == 0 and _on_segment(p1, p2, q1):
        return True
    if d4 == 0 and _on_segment(p1, p2, q2):
        return True
    return False


def is_simple(points: Sequence[Point], closed: bool = True) -> bool:
    """Check that a polyline (closed loop by default) has no self-intersections.

    Adjacent segments may only share their common vertex and must not fold
    back onto each other.
    """
    pts = [(float(x), float(y)) for x, y in points]
    n = len(pts)
    m = n if closed else n - 1
    segs = [(pts[i], pts[(i + 1) % n]) for i in range(m)]
    for i, (a, b) in enumerate(segs):
        if a == b:
            return False
    for i in range(m):
        a, b = segs[i]
        for j in range(i + 1, m):
            c, d = segs[j]
            adjacent = j == i + 1 or (closed and i == 0 and j == m - 1)
            if adjacent:
                # shared vertex is fine; a fold-back is not
                shared = b if j == i + 1 else a
                other_i = a if j == i + 1 else b
                other_j = d if j == i + 1 else c
                if _orient(other_i, shared, other_j) == 0:
                    u = (other_i[0] - shared[0], other_i[1] - shared[1])
                    v = (other_j[0] - shared[0], other_j[1] - shared[1])
                    if u[0] * v[0] + u[1] * v[1] > 0:
                        return False
                continue
            if segments_intersect(a, b, c, d):
                return False
    return True


@dataclass(frozen=True)
class Polygon:
    """Simple counter-clockwise polygon."""

    vertices: tuple[Point, ...]

    def __init__(self, vertices: Iterable[Sequence[float]], validate: bool = True):
        pts = tuple((float(v[0]), float(v[1])) for v in vertices)
        if len(pts) >= 2 and pts[0] == pts[-1]:
            pts = pts[:-1]
        object.__setattr__(self, "vertices", pts)
        if validate:
            if len(pts) < 3:
                raise GeometryError("a polygon needs at least three vertices")
            if not signed_area(pts) > 0:
                raise GeometryError("polygon must be counter-clockwise with positive area")
            if not is_simple(pts):
                raise GeometryError("polygon is not simple")

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    @property
    def perimeter(self) -> float:
        return math.fsum(math.dist(a, b) for a, b in self.edges())

    def edges(self):
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]

    def scale_hint(self) -> float:
        pts = np.asarray(self.vertices)
        span = pts.max(axis=0) - pts.min(axis=0)
        return float(max(span.max(), np.abs(pts).max(), 1e-300))


@dataclass(frozen=True)
class Line:
    """Directed line; the closed half-plane to its left is the admissible side."""

    point: Point
    direction: Point

    def __post_init__(self):
        dx, dy = (float(c) for c in self.direction)
        norm = math.hypot(dx, dy)
        if norm == 0:
            raise DomainError("line direction must be non-zero")
        object.__setattr__(self, "point", (float(self.point[0]), float(self.point[1])))
        object.__setattr__(self, "direction", (dx / norm, dy / norm))

    def offset(self, q: Point) -> float:
        """Signed distance, positive on the admissible side."""
        dx, dy = self.direction
        return dx * (q[1] - self.point[1]) - dy * (q[0] - self.point[0])

    def project(self, q: Point) -> Point:
        dx, dy = self.direction
        s = (q[0] - self.point[0]) * dx + (q[1] - self.point[1]) * dy
        return (self.point[0] + s * dx, self.point[1] + s * dy)

    def mirror(self, q: Point) -> Point:
        f = self.project(q)
        return (2.0 * f[0] - q[0], 2.0 * f[1] - q[1])


def _contact_flags(p: Polygon, line: Line, tol: float) -> list[bool]:
    offsets = [line.offset(v) for v in p.vertices]
    if min(offsets) < -tol:
        raise DomainError("polygon crosses the reflection axis")
    return [abs(d) <= tol for d in offsets]


def length_off_line(p: Polygon, line: Line, tol: float | None = None) -> float:
    """Boundary length of ``p`` excluding edges that lie on ``line``."""
    tol = 1e-9 * p.scale_hint() if tol is None else tol
    total = 0.0
    for a, b in p.edges():
        if abs(line.offset(a)) <= tol and abs(line.offset(b)) <= tol:
            continue
        total += math.dist(a, b)
    return total


def reflect_half_plane(p: Polygon, axis: Line, tol: float | None = None) -> Polygon:
    """Union of ``p`` with its mirror image across ``axis``.

    ``p`` must sit on the left of ``axis`` and share one contiguous run of
    edges with it. The union is assembled by splicing the free boundary of
    ``p`` to its mirrored copy at the two ends of the contact run, so the
    result has twice the area and twice the off-axis boundary length.
    """
    tol = 1e-9 * p.scale_hint() if tol is None else tol
    on = _contact_flags(p, axis, tol)
    n = len(p)
    contact = [on[i] and on[(i + 1) % n] for i in range(n)]
    if not any(contact):
        if any(on):
            raise UnsupportedInputError("polygon touches the axis only at isolated points")
        raise UnsupportedInputError("polygon does not touch the axis")
    if all(contact):
        raise GeometryError("polygon is degenerate: every edge lies on the axis")
    # starts of contact runs: contact edge preceded by a free edge
    starts = [i for i in range(n) if contact[i] and not contact[i - 1]]
    if len(starts) != 1:
        raise UnsupportedInputError(
            "polygon meets the axis along several disjoint segments; the mirror union has holes"
        )
    a = starts[0]
    b = a
    while contact[b % n]:
        b += 1
    b %= n
    free = [p.vertices[(b + i) % n] for i in range((a - b) % n + 1)]
    if any(on[(b + i) % n] for i in range(1, len(free) - 1)):
        raise UnsupportedInputError("polygon has an extra point contact with the axis")
    free[0] = axis.project(free[0])
    free[-1] = axis.project(free[-1])
    mirrored = [axis.mirror(q) for q in reversed(free)]
    return Polygon(free + mirrored[1:-1])


def reflect_quarter_plane(
    p: Polygon, corner: Point, d1: Point, d2: Point, tol: float | None = None
) -> Polygon:
    """Fourfold mirror union of ``p`` lying in the quarter-plane ``corner + s*d1 + t*d2``.

    ``p`` is mirrored across the ``d1`` ray's line first, then the doubled
    shape across the ``d2`` line.
    """
    u1 = np.asarray(d1, dtype=float)
    u2 = np.asarray(d2, dtype=float)
    if np.linalg.norm(u1) == 0 or np.linalg.norm(u2) == 0:
        raise DomainError("quarter-plane directions must be non-zero")
    u1 = u1 / np.linalg.norm(u1)
    u2 = u2 / np.linalg.norm(u2)
    if abs(float(np.dot(u1, u2))) > 1e-12:
        raise DomainError("quarter-plane directions must be orthogonal")
    corner = (float(corner[0]), float(corner[1]))

    def left_facing(along, inward) -> Line:
        line = Line(corner, tuple(along))
        probe = (corner[0] + inward[0], corner[1] + inward[1])
        if line.offset(probe) < 0:
            line = Line(corner, tuple(-along))
        return line

    first = left_facing(u1, u2)
    second = left_facing(u2, u1)
    tol = 1e-9 * p.scale_hint() if tol is None else tol
    _contact_flags(p, second, tol)
    doubled = reflect_half_plane(p, first, tol)
    return reflect_half_plane(doubled, second, tol)


_SIDES = ("bottom", "right", "top", "left")


def _side_distance(side: str, q: Point, rect: Rect) -> float:
    if side == "bottom":
        return abs(q[1])
    if side == "top":
        return abs(q[1] - rect.y)
    if side == "left":
        return abs(q[0])
    return abs(q[0] - rect.x)


def border_contact(p: Polygon, rect: Rect) -> dict[str, float]:
    """Length of ``p``'s boundary lying on each side of ``rect``.

    An edge counts as on a side when both endpoints are within
    ``1e-9 * max(x, y)`` of that side's line.
    """
    tol = 1e-9 * max(rect.x, rect.y)
    for vx, vy in p.vertices:
        if vx < -tol or vy < -tol or vx > rect.x + tol or vy > rect.y + tol:
            raise DomainError(f"vertex ({vx}, {vy}) lies outside the rectangle")
    contact = dict.fromkeys(_SIDES, 0.0)
    for a, b in p.edges():
        for side in _SIDES:
            if _side_distance(side, a, rect) <= tol and _side_distance(side, b, rect) <= tol:
                contact[side] += math.dist(a, b)
                break
    return contact


def free_perimeter_polygon(p: Polygon, rect: Rect) -> float:
    """Boundary length of ``p`` that does not run along the rectangle border."""
    contact = border_contact(p, rect)
    return max(p.perimeter - math.fsum(contact.values()), 0.0)


def touch_class_polygon(p: Polygon, rect: Rect) -> TouchClass:
    tol = 1e-9 * max(rect.x, rect.y)
    contact = border_contact(p, rect)
    return TouchClass.from_sides(side for side, length in contact.items() if length > tol)


def regular_arc_polygon(radius: float, n_vertices: int, corner: Point = (0.0, 0.0)) -> Polygon:
    """Quarter-disk polygon: the corner plus ``n_vertices - 1`` points on the arc."""
    if n_vertices < 3:
        raise DomainError("need at least three vertices")
    theta = np.linspace(0.0, 0.5 * math.pi, n_vertices - 1)
    cx, cy = corner
    arc = [(cx + radius * math.cos(t), cy + radius * math.sin(t)) for t in theta]
    arc[0] = (cx + radius, cy)
    arc[-1] = (cx, cy + radius)
    return Polygon([(cx, cy)] + arc)
