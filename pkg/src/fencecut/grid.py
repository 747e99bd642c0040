"""Discrete free-perimeter search over connected cell sets of a gridded rectangle.

``oracle_min_free_perimeter`` enumerates every connected ``k``-cell subset
(ESU-style canonical growth from the smallest cell, bitmask state) and is
exact. ``anneal_min_free_perimeter`` is a seeded simulated-annealing upper
bound for grids too large to enumerate.

Cells are ``(col, row)`` pairs; ``col`` runs along the rectangle side of
``cols * cell`` and ``row`` along the side of ``rows * cell``.
"""

from __future__ import annotations

import math
import random
import sys
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .errors import CapacityError, DomainError
from .isoperimetrics import Rect, TouchClass

__all__ = [
    "GridDomain",
    "GridShape",
    "AnnealSchedule",
    "ENUMERATION_CAP",
    "grid_free_perimeter",
    "grid_touch_class",
    "complement_components",
    "is_connected",
    "oracle_min_free_perimeter",
    "anneal_min_free_perimeter",
    "random_connected_shape",
]

ENUMERATION_CAP = 24

Cell = tuple[int, int]


@dataclass(frozen=True)
class GridDomain:
    cols: int
    rows: int
    cell: float = 1.0

    def __post_init__(self):
        if int(self.cols) != self.cols or int(self.rows) != self.rows:
            raise DomainError("grid dimensions must be integers")
        if self.cols < 1 or self.rows < 1:
            raise DomainError("grid needs at least one column and one row")
        if not self.cell > 0 or not math.isfinite(self.cell):
            raise DomainError("cell size must be positive")

    @property
    def size(self) -> int:
        return self.cols * self.rows

    def rect(self) -> Rect:
        return Rect(self.cols * self.cell, self.rows * self.cell)

    def contains(self, c: Cell) -> bool:
        return 0 <= c[0] < self.cols and 0 <= c[1] < self.rows

    def neighbors(self, c: Cell):
        col, row = c
        for nc, nr in ((col - 1, row), (col + 1, row), (col, row - 1), (col, row + 1)):
            if 0 <= nc < self.cols and 0 <= nr < self.rows:
                yield (nc, nr)

    def cells(self):
        for col in range(self.cols):
            for row in range(self.rows):
                yield (col, row)

    # cell <-> bit index; column-major so that bit order is (col, row) lexicographic order
    def index(self, c: Cell) -> int:
        return c[0] * self.rows + c[1]

    def cell_at(self, i: int) -> Cell:
        return divmod(i, self.rows)


def is_connected(cells: Iterable[Cell]) -> bool:
    cells = set(cells)
    if not cells:
        return True
    start = next(iter(cells))
    seen = {start}
    queue = deque([start])
    while queue:
        col, row = queue.popleft()
        for nb in ((col - 1, row), (col + 1, row), (col, row - 1), (col, row + 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return len(seen) == len(cells)


@dataclass(frozen=True)
class GridShape:
    """A 4-connected set of grid cells (possibly empty)."""

    cells: frozenset = field(default_factory=frozenset)

    def __init__(self, cells: Iterable[Cell] = (), check: bool = True):
        cs = frozenset((int(c[0]), int(c[1])) for c in cells)
        if check and not is_connected(cs):
            raise DomainError("grid shape must be 4-connected")
        object.__setattr__(self, "cells", cs)

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(sorted(self.cells))

    def __contains__(self, c) -> bool:
        return tuple(c) in self.cells

    def sorted_cells(self) -> tuple[Cell, ...]:
        return tuple(sorted(self.cells))

    def area(self, d: GridDomain) -> float:
        return len(self.cells) * d.cell**2


def _check_within(g: GridShape, d: GridDomain) -> None:
    for c in g.cells:
        if not d.contains(c):
            raise DomainError(f"cell {c} lies outside the {d.cols}x{d.rows} grid")


def _boundary_edges(cells: frozenset, d: GridDomain) -> int:
    return sum(1 for c in cells for nb in d.neighbors(c) if nb not in cells)


def grid_free_perimeter(g: GridShape, d: GridDomain) -> float:
    """Length of cell edges separating ``g`` from the rest of the domain."""
    _check_within(g, d)
    return _boundary_edges(g.cells, d) * d.cell


def grid_touch_class(g: GridShape, d: GridDomain) -> TouchClass:
    _check_within(g, d)
    sides = set()
    for col, row in g.cells:
        if row == 0:
            sides.add("bottom")
        if row == d.rows - 1:
            sides.add("top")
        if col == 0:
            sides.add("left")
        if col == d.cols - 1:
            sides.add("right")
    return TouchClass.from_sides(sides)


def complement_components(g: GridShape, d: GridDomain) -> list[GridShape]:
    """4-connected components of the domain minus ``g``, ordered by smallest cell."""
    _check_within(g, d)
    rest = set(d.cells()) - g.cells
    components = []
    while rest:
        start = min(rest)
        comp = {start}
        queue = deque([start])
        rest.discard(start)
        while queue:
            for nb in d.neighbors(queue.popleft()):
                if nb in rest:
                    rest.discard(nb)
                    comp.add(nb)
                    queue.append(nb)
        components.append(GridShape(comp, check=False))
    components.sort(key=lambda s: min(s.cells))
    return components


def _mask_to_shape(mask: int, d: GridDomain) -> GridShape:
    cells = []
    i = 0
    while mask:
        if mask & 1:
            cells.append(d.cell_at(i))
        mask >>= 1
        i += 1
    return GridShape(cells, check=False)


def oracle_min_free_perimeter(
    d: GridDomain, k: int, cap: int = ENUMERATION_CAP
) -> tuple[float, GridShape]:
    """Exact minimum free perimeter over all connected ``k``-cell shapes.

    Ties are broken towards the lexicographically least sorted cell tuple.
    Raises :class:`CapacityError` when the domain has more than ``cap`` cells.
    """
    n = d.size
    if int(k) != k or not 0 <= k <= n:
        raise DomainError(f"cell count must be in [0, {n}], got {k}")
    if n > cap:
        raise CapacityError(
            f"{d.cols}x{d.rows} grid has {n} cells, above the enumeration cap of {cap}; "
            "use anneal_min_free_perimeter instead"
        )
    if k == 0:
        return 0.0, GridShape()
    if k == n:
        return 0.0, _mask_to_shape((1 << n) - 1, d)

    nbr = [0] * n
    deg = [0] * n
    for c in d.cells():
        i = d.index(c)
        for nb in d.neighbors(c):
            nbr[i] |= 1 << d.index(nb)
        deg[i] = bin(nbr[i]).count("1")

    best_edges = sys.maxsize
    best_mask = 0

    def grow(sub: int, size: int, edges: int, ext: int, closed: int, above: int):
        nonlocal best_edges, best_mask
        if size == k:
            if edges < best_edges:
                best_edges, best_mask = edges, sub
            elif edges == best_edges:
                low = (sub ^ best_mask) & -(sub ^ best_mask)
                if sub & low:
                    best_mask = sub
            return
        while ext:
            wbit = ext & -ext
            ext ^= wbit
            w = wbit.bit_length() - 1
            new_edges = edges + deg[w] - 2 * bin(nbr[w] & sub).count("1")
            new_ext = ext | (nbr[w] & ~closed & above)
            grow(sub | wbit, size + 1, new_edges, new_ext, closed | nbr[w], above)

    full = (1 << n) - 1
    for v in range(n):
        vbit = 1 << v
        above = full & ~((vbit << 1) - 1)
        grow(vbit, 1, deg[v], nbr[v] & above, nbr[v] | vbit, above)

    return best_edges * d.cell, _mask_to_shape(best_mask, d)


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling: ``T = t0_factor * cell * ratio**sweep``.

    One sweep is ``moves_per_sweep`` proposals, defaulting to the number of
    cells in the domain.
    """

    t0_factor: float = 2.0
    ratio: float = 0.995
    sweeps: int = 200
    moves_per_sweep: int | None = None


def random_connected_shape(d: GridDomain, k: int, rng: random.Random) -> GridShape:
    """Grow a connected ``k``-cell shape from a random cell by random frontier additions."""
    if not 0 <= k <= d.size:
        raise DomainError(f"cell count must be in [0, {d.size}], got {k}")
    if k == 0:
        return GridShape()
    all_cells = list(d.cells())
    start = all_cells[rng.randrange(len(all_cells))]
    shape = {start}
    frontier = set(d.neighbors(start))
    while len(shape) < k:
        nxt = sorted(frontier)[rng.randrange(len(frontier))]
        frontier.discard(nxt)
        shape.add(nxt)
        frontier.update(nb for nb in d.neighbors(nxt) if nb not in shape)
    return GridShape(shape, check=False)


def _constructive_starts(d: GridDomain, k: int) -> list[set]:
    """Slab, corner-disk and far-corner-complement seeds; each is connected."""
    slab = {(i % d.cols, i // d.cols) for i in range(k)}

    def by_distance(cx, cy):
        return sorted(d.cells(), key=lambda c: ((c[0] + 0.5 - cx) ** 2 + (c[1] + 0.5 - cy) ** 2, c))

    corner = set(by_distance(0, 0)[:k])
    far = set(d.cells()) - set(by_distance(d.cols, d.rows)[: d.size - k])
    return [slab, corner, far]


def anneal_min_free_perimeter(
    d: GridDomain,
    k: int,
    seed: int = 0,
    schedule: AnnealSchedule | None = None,
    init: str = "constructive",
) -> tuple[float, GridShape]:
    """Simulated-annealing upper bound on the minimum free perimeter.

    Each proposal removes one cell of the shape and adds one cell adjacent to
    what remains; proposals that would disconnect the shape are rejected.
    ``init="constructive"`` starts from the best of a straight slab and the
    two corner-disk seeds, ``init="random"`` from a random connected shape.
    The best shape visited is returned; results depend only on ``seed``.
    """
    schedule = schedule or AnnealSchedule()
    n = d.size
    if int(k) != k or not 0 <= k <= n:
        raise DomainError(f"cell count must be in [0, {n}], got {k}")
    if k == 0:
        return 0.0, GridShape()
    if k == n:
        return 0.0, GridShape(d.cells(), check=False)

    rng = random.Random(seed)
    if init == "constructive":
        starts = _constructive_starts(d, k)
        current = min(starts, key=lambda s: (_boundary_edges(frozenset(s), d), sorted(s)))
    elif init == "random":
        current = set(random_connected_shape(d, k, rng).cells)
    else:
        raise ValueError(f"unknown init {init!r}")

    cols, rows = d.cols, d.rows
    inside = bytearray(n)
    members = []
    pos = {}
    for c in current:
        i = c[0] * rows + c[1]
        inside[i] = 1
        pos[i] = len(members)
        members.append(i)

    nbrs = []
    for i in range(n):
        col, row = divmod(i, rows)
        nbrs.append([nc * rows + nr for nc, nr in d.neighbors((col, row))])

    # 8-neighbourhood ring in cyclic order, None where outside the domain
    offsets = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))
    rings = []
    for i in range(n):
        col, row = divmod(i, rows)
        ring = []
        for dc, dr in offsets:
            nc, nr = col + dc, row + dr
            ring.append(nc * rows + nr if 0 <= nc < cols and 0 <= nr < rows else None)
        rings.append(ring)

    def local_removal_safe(r: int) -> bool:
        ring = rings[r]
        occ = [j is not None and inside[j] == 1 for j in ring]
        if not any(occ[0::2]):
            return False
        if all(occ):
            return True
        # rotate so the ring starts at an empty slot, then count arcs holding edge neighbours
        s = occ.index(False)
        arcs_with_edge = 0
        in_arc = False
        arc_has_edge = False
        for t in range(1, 9):
            idx = (s + t) % 8
            if occ[idx]:
                if not in_arc:
                    in_arc, arc_has_edge = True, False
                if idx % 2 == 0:
                    arc_has_edge = True
            else:
                if in_arc:
                    arcs_with_edge += arc_has_edge
                    in_arc = False
        if in_arc:
            arcs_with_edge += arc_has_edge
        return arcs_with_edge == 1

    def connected_after(r: int, c: int) -> bool:
        start = c
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in nbrs[u]:
                if v != r and (inside[v] or v == c) and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == k

    edges = sum(1 for i in members for j in nbrs[i] if not inside[j])
    best_edges = edges
    best_members = sorted(members)

    moves = schedule.moves_per_sweep or n
    temperature = schedule.t0_factor * d.cell
    for _ in range(schedule.sweeps):
        for _ in range(moves):
            r = members[rng.randrange(k)]
            if k == 1:
                c = rng.randrange(n)
                if c == r:
                    continue
            else:
                anchor = members[rng.randrange(k)]
                if anchor == r:
                    continue
                opts = nbrs[anchor]
                c = opts[rng.randrange(len(opts))]
                if inside[c] or c == r:
                    continue
            # edge-count change for removing r, then adding c
            d_remove = sum(1 if inside[j] else -1 for j in nbrs[r])
            inside[r] = 0
            d_add = sum(-1 if inside[j] else 1 for j in nbrs[c])
            delta = d_remove + d_add
            accept = delta <= 0 or rng.random() < math.exp(-delta * d.cell / temperature)
            if accept and k > 1:
                inside[r] = 1
                ok = local_removal_safe(r)
                inside[r] = 0
                if not ok:
                    ok = connected_after(r, c)
                accept = ok
            if not accept:
                inside[r] = 1
                continue
            inside[c] = 1
            p = pos.pop(r)
            members[p] = c
            pos[c] = p
            edges += delta
            if edges < best_edges:
                best_edges = edges
                best_members = sorted(members)
        temperature *= schedule.ratio

    shape = GridShape((divmod(i, rows) for i in best_members), check=False)
    return best_edges * d.cell, shape
