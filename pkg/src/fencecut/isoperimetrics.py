"""Closed-form free-perimeter bounds for shapes inside a rectangle.

The rectangle is always held with its short side ``x`` first. The local
frame is ``[0, x] x [0, y]``: the short side runs horizontally, the long
side vertically, and the origin corner sits at ``(0, 0)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import DomainError

__all__ = [
    "Rect",
    "TouchClass",
    "Regime",
    "Corner",
    "StraightCut",
    "QuarterArc",
    "Empty",
    "FenceGeometry",
    "SubareaPartition",
    "check_area",
    "iso_lower_plane",
    "iso_lower_half_plane",
    "iso_lower_quarter_plane",
    "case_lower_bound",
    "quarter_disk_threshold",
    "l_star",
    "regime",
    "optimal_fence",
    "max_sum_sqrt",
    "sum_sqrt_lower",
]


@dataclass(frozen=True)
class Rect:
    """Ambient rectangle with ``x <= y``; sides may be passed in either order."""

    x: float
    y: float

    def __post_init__(self):
        x, y = float(self.x), float(self.y)
        if not (math.isfinite(x) and math.isfinite(y)) or x <= 0 or y <= 0:
            raise DomainError(f"rectangle sides must be positive and finite, got {self.x}, {self.y}")
        if x > y:
            x, y = y, x
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def area(self) -> float:
        return self.x * self.y

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.x + self.y)


class TouchClass(enum.Enum):
    """Which rectangle sides a shape meets along a segment of positive length."""

    ZERO = "zero"
    ONE = "one"
    TWO_ADJACENT = "two-adjacent"
    TWO_OPPOSITE = "two-opposite"
    THREE = "three"
    FOUR = "four"

    @classmethod
    def from_sides(cls, sides: Iterable[str]) -> "TouchClass":
        """Classify a set of side names drawn from bottom/right/top/left."""
        touched = set(sides)
        unknown = touched - {"bottom", "right", "top", "left"}
        if unknown:
            raise ValueError(f"unknown side names {sorted(unknown)}")
        n = len(touched)
        if n == 2:
            if touched in ({"bottom", "top"}, {"left", "right"}):
                return cls.TWO_OPPOSITE
            return cls.TWO_ADJACENT
        return {0: cls.ZERO, 1: cls.ONE, 3: cls.THREE, 4: cls.FOUR}[n]


class Regime(enum.Enum):
    QUARTER_DISK = "quarter-disk"
    STRAIGHT_CUT = "straight-cut"
    COMPLEMENT_QUARTER_DISK = "complement-quarter-disk"


class Corner(enum.Enum):
    LOWER_LEFT = "lower-left"
    LOWER_RIGHT = "lower-right"
    UPPER_RIGHT = "upper-right"
    UPPER_LEFT = "upper-left"

    def point(self, rect: Rect) -> tuple[float, float]:
        return {
            Corner.LOWER_LEFT: (0.0, 0.0),
            Corner.LOWER_RIGHT: (rect.x, 0.0),
            Corner.UPPER_RIGHT: (rect.x, rect.y),
            Corner.UPPER_LEFT: (0.0, rect.y),
        }[self]


@dataclass(frozen=True)
class StraightCut:
    """Segment parallel to the short side at height ``offset``.

    The enclosed region is the slab between the origin side and the cut.
    """

    offset: float
    span: float

    @property
    def length(self) -> float:
        return self.span

    @property
    def enclosed_area(self) -> float:
        return self.span * self.offset


@dataclass(frozen=True)
class QuarterArc:
    """Quarter circle of ``radius`` centred on ``corner``.

    With ``complement=True`` the target region is everything outside the
    arc, i.e. the arc cuts off the complement of the requested area.
    """

    radius: float
    corner: Corner = Corner.LOWER_LEFT
    complement: bool = False
    rect_area: float = 0.0

    @property
    def length(self) -> float:
        return 0.5 * math.pi * self.radius

    @property
    def disk_area(self) -> float:
        return 0.25 * math.pi * self.radius**2

    @property
    def enclosed_area(self) -> float:
        if self.complement:
            return self.rect_area - self.disk_area
        return self.disk_area


@dataclass(frozen=True)
class Empty:
    """No fence: either nothing (``full=False``) or the whole rectangle is enclosed."""

    full: bool = False
    rect_area: float = 0.0

    @property
    def length(self) -> float:
        return 0.0

    @property
    def enclosed_area(self) -> float:
        return self.rect_area if self.full else 0.0


FenceGeometry = Union[StraightCut, QuarterArc, Empty]


@dataclass(frozen=True)
class SubareaPartition:
    """Positive areas ``parts`` summing to ``total``."""

    parts: tuple[float, ...]

    def __init__(self, parts: Iterable[float]):
        values = tuple(float(p) for p in parts)
        if not values:
            raise DomainError("a partition needs at least one part")
        if any(not math.isfinite(p) or p <= 0 for p in values):
            raise DomainError("partition parts must be positive and finite")
        object.__setattr__(self, "parts", values)

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def total(self) -> float:
        return math.fsum(self.parts)


AREA_SLACK = 1e-12


def _check_nonnegative(a: float) -> float:
    a = float(a)
    if not a >= 0 or not math.isfinite(a):
        raise DomainError(f"area must be a finite non-negative number, got {a}")
    return a


def check_area(rect: Rect, a: float) -> float:
    """Validate that ``a`` lies in ``[0, rect.area()]`` and return it as float.

    Overshoot by at most ``AREA_SLACK`` relative is rounding noise (a grid's
    ``k * cell**2`` against ``cols*cell * rows*cell``) and is clamped.
    """
    a = _check_nonnegative(a)
    full = rect.area()
    if a > full:
        if a > full * (1 + AREA_SLACK):
            raise DomainError(f"area {a} exceeds rectangle area {full}")
        a = full
    return a


def iso_lower_plane(a: float) -> float:
    """Shortest closed curve enclosing area ``a`` in the plane: ``2*sqrt(pi*a)``."""
    return 2.0 * math.sqrt(math.pi * _check_nonnegative(a))


def iso_lower_half_plane(a: float) -> float:
    """Shortest free perimeter of a shape of area ``a`` in a half-plane."""
    return math.sqrt(2.0 * math.pi * _check_nonnegative(a))


def iso_lower_quarter_plane(a: float) -> float:
    """Shortest free perimeter of a shape of area ``a`` in a quarter-plane."""
    return math.sqrt(math.pi * _check_nonnegative(a))


def case_lower_bound(tc: TouchClass, rect: Rect, a: float) -> float:
    """Lower bound on the free perimeter of an area-``a`` shape in touch class ``tc``."""
    a = check_area(rect, a)
    if tc is TouchClass.ZERO:
        return iso_lower_plane(a)
    if tc is TouchClass.ONE:
        return iso_lower_half_plane(a)
    if tc is TouchClass.TWO_ADJACENT:
        return iso_lower_quarter_plane(a)
    if tc is TouchClass.TWO_OPPOSITE:
        return 2.0 * rect.x
    if tc is TouchClass.THREE:
        return rect.x
    if tc is TouchClass.FOUR:
        return iso_lower_quarter_plane(max(rect.area() - a, 0.0))
    raise TypeError(f"not a TouchClass: {tc!r}")


def quarter_disk_threshold(rect: Rect) -> float:
    """Area ``x**2 / pi`` below which a corner arc beats the straight cut."""
    return rect.x**2 / math.pi


def regime(rect: Rect, a: float) -> Regime:
    """Which branch of the optimal free perimeter applies at area ``a``.

    Exact threshold areas classify as straight cut.
    """
    a = check_area(rect, a)
    t = quarter_disk_threshold(rect)
    if a < t:
        return Regime.QUARTER_DISK
    if a > rect.area() - t:
        return Regime.COMPLEMENT_QUARTER_DISK
    return Regime.STRAIGHT_CUT


def l_star(rect: Rect, a: float) -> float:
    """Minimum free perimeter over all shapes of area ``a`` inside ``rect``."""
    r = regime(rect, a)
    if r is Regime.QUARTER_DISK:
        return math.sqrt(math.pi * a)
    if r is Regime.COMPLEMENT_QUARTER_DISK:
        return math.sqrt(math.pi * max(rect.area() - a, 0.0))
    return rect.x


def optimal_fence(rect: Rect, a: float) -> FenceGeometry:
    """Construct a fence achieving ``l_star(rect, a)``.

    Arcs are centred on the origin corner; straight cuts enclose the slab
    ``[0, x] x [0, a/x]``.
    """
    r = regime(rect, a)
    total = rect.area()
    if a == 0.0:
        return Empty(full=False, rect_area=total)
    if a == total:
        return Empty(full=True, rect_area=total)
    if r is Regime.STRAIGHT_CUT:
        return StraightCut(offset=a / rect.x, span=rect.x)
    if r is Regime.QUARTER_DISK:
        return QuarterArc(radius=math.sqrt(4.0 * a / math.pi), rect_area=total)
    return QuarterArc(
        radius=math.sqrt(4.0 * (total - a) / math.pi), complement=True, rect_area=total
    )


def max_sum_sqrt(k: int, a_total: float) -> float:
    """Largest value of ``sum(sqrt(A_i))`` over ``k`` parts summing to ``a_total``.

    Attained by the equal split ``A_i = a_total / k``.
    """
    if int(k) != k or k < 1:
        raise DomainError(f"number of parts must be a positive integer, got {k}")
    return math.sqrt(k * _check_nonnegative(a_total))


def sum_sqrt_lower(partition: SubareaPartition) -> float:
    """``sum(sqrt(A_i))``, which lies between ``sqrt(total)`` and ``sqrt(k*total)``."""
    return math.fsum(math.sqrt(p) for p in partition.parts)
