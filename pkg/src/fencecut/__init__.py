"""Shortest fences separating a region of given area inside a rectangle.

The analytic answer lives in :mod:`fencecut.isoperimetrics`; the grid and
polyline modules are independent numerical checks of it.
"""

from .errors import CapacityError, DomainError, FenceError, GeometryError, UnsupportedInputError
from .isoperimetrics import (
    Corner,
    Empty,
    QuarterArc,
    Rect,
    Regime,
    StraightCut,
    SubareaPartition,
    TouchClass,
    case_lower_bound,
    iso_lower_half_plane,
    iso_lower_plane,
    iso_lower_quarter_plane,
    l_star,
    max_sum_sqrt,
    optimal_fence,
    regime,
    sum_sqrt_lower,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DomainError",
    "FenceError",
    "GeometryError",
    "UnsupportedInputError",
    "Corner",
    "Empty",
    "QuarterArc",
    "Rect",
    "Regime",
    "StraightCut",
    "SubareaPartition",
    "TouchClass",
    "case_lower_bound",
    "iso_lower_half_plane",
    "iso_lower_plane",
    "iso_lower_quarter_plane",
    "l_star",
    "max_sum_sqrt",
    "optimal_fence",
    "regime",
    "sum_sqrt_lower",
]
