import itertools
import random

import pytest

from fencecut import CapacityError, DomainError, Rect, TouchClass, case_lower_bound, l_star
from fencecut.grid import (
    AnnealSchedule,
    GridDomain,
    GridShape,
    anneal_min_free_perimeter,
    complement_components,
    grid_free_perimeter,
    grid_touch_class,
    is_connected,
    oracle_min_free_perimeter,
    random_connected_shape,
)


def brute_force(d: GridDomain, k: int):
    """Scan every k-subset, keep connected ones, count cut edges directly."""
    cells = sorted(d.cells())
    best, witness = None, None
    for combo in itertools.combinations(cells, k):
        s = set(combo)
        if k and not is_connected(s):
            continue
        cut = 0
        for (c, r) in s:
            for nb in ((c + 1, r), (c - 1, r), (c, r + 1), (c, r - 1)):
                if d.contains(nb) and nb not in s:
                    cut += 1
        # combinations() yields in lexicographic order, so the first minimum is lex-least
        if best is None or cut < best:
            best, witness = cut, tuple(sorted(s))
    return best * d.cell, witness


SMALL = [(1, 1), (1, 4), (2, 2), (2, 3), (3, 3), (2, 5), (3, 4)]


@pytest.mark.parametrize("cols, rows", SMALL)
def test_oracle_matches_brute_force(cols, rows):
    d = GridDomain(cols, rows, 1.0)
    for k in range(d.size + 1):
        value, shape = oracle_min_free_perimeter(d, k)
        ref, ref_shape = brute_force(d, k)
        assert value == ref
        assert shape.sorted_cells() == ref_shape
        assert grid_free_perimeter(shape, d) == value


def test_oracle_examples():
    d = GridDomain(3, 4, 1.0)
    value, shape = oracle_min_free_perimeter(d, 3)
    assert value == 3.0
    assert shape.sorted_cells() == ((0, 0), (1, 0), (2, 0))
    assert value == l_star(Rect(3, 4), 3.0)
    assert oracle_min_free_perimeter(d, 0)[0] == 0.0
    value, shape = oracle_min_free_perimeter(GridDomain(2, 2, 1.0), 2)
    assert value == 2.0 and len(shape) == 2 and is_connected(shape)


def test_oracle_scales_with_cell_size():
    assert oracle_min_free_perimeter(GridDomain(3, 4, 0.5), 3)[0] == 1.5


def test_oracle_capacity_error():
    with pytest.raises(CapacityError, match="anneal"):
        oracle_min_free_perimeter(GridDomain(5, 5, 1.0), 3)
    with pytest.raises(CapacityError):
        oracle_min_free_perimeter(GridDomain(3, 3, 1.0), 3, cap=8)


def test_oracle_rejects_bad_k():
    with pytest.raises(DomainError):
        oracle_min_free_perimeter(GridDomain(2, 2, 1.0), 5)
    with pytest.raises(DomainError):
        oracle_min_free_perimeter(GridDomain(2, 2, 1.0), -1)


def test_grid_domain_validation():
    for args in [(0, 1, 1.0), (1, 0, 1.0), (1, 1, 0.0), (1, 1, -2.0)]:
        with pytest.raises(DomainError):
            GridDomain(*args)
    assert GridDomain(4, 3, 0.5).rect() == Rect(2.0, 1.5)


def test_shape_must_be_connected():
    with pytest.raises(DomainError):
        GridShape([(0, 0), (1, 1)])


def test_free_perimeter_examples():
    assert grid_free_perimeter(GridShape([(0, 0)]), GridDomain(2, 2, 1.0)) == 2.0
    d = GridDomain(3, 4, 1.0)
    assert grid_free_perimeter(GridShape(d.cells()), d) == 0.0
    strip = GridShape([(0, 0), (1, 0), (2, 0)])
    assert grid_free_perimeter(strip, d) == 3.0
    with pytest.raises(DomainError):
        grid_free_perimeter(GridShape([(3, 0)]), d)


def test_touch_class_examples():
    d = GridDomain(3, 4, 1.0)
    assert grid_touch_class(GridShape([(0, 0)]), d) is TouchClass.TWO_ADJACENT
    assert grid_touch_class(GridShape([(0, 1), (1, 1), (2, 1)]), d) is TouchClass.TWO_OPPOSITE
    assert grid_touch_class(GridShape([(0, 0), (1, 0), (2, 0)]), d) is TouchClass.THREE
    assert grid_touch_class(GridShape([(1, 1)]), d) is TouchClass.ZERO
    assert grid_touch_class(GridShape(d.cells()), d) is TouchClass.FOUR


def test_complement_components_examples():
    d = GridDomain(3, 3, 1.0)
    plus = GridShape([(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)])
    comps = complement_components(plus, d)
    assert [c.sorted_cells() for c in comps] == [((0, 0),), ((0, 2),), ((2, 0),), ((2, 2),)]
    assert sum(grid_free_perimeter(c, d) for c in comps) == grid_free_perimeter(plus, d)
    d = GridDomain(3, 4, 1.0)
    assert len(complement_components(GridShape([(0, 0), (1, 0), (2, 0)]), d)) == 1
    assert complement_components(GridShape(d.cells()), d) == []


def test_complement_identity_on_random_shapes():
    d = GridDomain(5, 6, 0.25)
    rng = random.Random(3)
    for _ in range(500):
        g = random_connected_shape(d, rng.randint(1, d.size), rng)
        comps = complement_components(g, d)
        assert sum(grid_free_perimeter(c, d) for c in comps) == grid_free_perimeter(g, d)


def test_case_bound_soundness_on_random_shapes():
    d = GridDomain(5, 6, 1.0)
    rect = d.rect()
    rng = random.Random(11)
    for _ in range(2000):
        k = rng.randint(1, d.size)
        g = random_connected_shape(d, k, rng)
        assert is_connected(g) and len(g) == k
        fp = grid_free_perimeter(g, d)
        a = g.area(d)
        assert fp >= case_lower_bound(grid_touch_class(g, d), rect, a) - 1e-9
        assert fp >= l_star(rect, a) - 1e-9


@pytest.mark.parametrize("cols, rows", [(2, 2), (2, 3), (3, 3), (3, 4), (4, 4), (2, 6)])
def test_oracle_never_beats_analytic_floor(cols, rows):
    d = GridDomain(cols, rows, 0.7)
    for k in range(d.size + 1):
        value, _ = oracle_min_free_perimeter(d, k)
        assert value >= l_star(d.rect(), k * 0.49) - 1e-9


@pytest.mark.parametrize("cols, rows", [(2, 2), (2, 5), (3, 4), (3, 6), (4, 6)])
def test_straight_cut_tightness(cols, rows):
    d = GridDomain(cols, rows, 1.0)
    rect = d.rect()
    for j in range(1, rows):
        k = cols * j
        if l_star(rect, float(k)) == rect.x:
            assert oracle_min_free_perimeter(d, k)[0] == cols


@pytest.mark.parametrize("cols, rows", [(3, 4), (4, 4), (2, 6)])
def test_oracle_complement_symmetry_where_connected(cols, rows):
    d = GridDomain(cols, rows, 1.0)
    for k in range(d.size + 1):
        v, _ = oracle_min_free_perimeter(d, k)
        w, _ = oracle_min_free_perimeter(d, d.size - k)
        assert v == w


def test_anneal_examples():
    d = GridDomain(3, 4, 1.0)
    for seed in range(5):
        value, shape = anneal_min_free_perimeter(d, 3, seed=seed)
        assert value == 3.0 and len(shape) == 3
    assert anneal_min_free_perimeter(d, 12, seed=0)[0] == 0.0
    assert anneal_min_free_perimeter(d, 0, seed=0)[0] == 0.0


def test_anneal_large_grid_reaches_straight_cut():
    d = GridDomain(20, 40, 0.05)
    value, shape = anneal_min_free_perimeter(d, 400, seed=0)
    assert len(shape) == 400 and is_connected(shape)
    assert value <= 1.0 + 2 * 0.05 + 1e-12
    assert value >= l_star(d.rect(), 1.0) - 1e-9


def test_anneal_from_random_start_stays_sound():
    d = GridDomain(8, 10, 0.1)
    value, shape = anneal_min_free_perimeter(d, 30, seed=4, init="random")
    assert is_connected(shape) and len(shape) == 30
    assert value == pytest.approx(grid_free_perimeter(shape, d))
    assert value >= l_star(d.rect(), shape.area(d)) - 1e-9


@pytest.mark.parametrize("cols, rows", [(2, 3), (3, 3), (3, 4), (4, 5), (4, 6)])
def test_anneal_matches_oracle_on_enumerable_domains(cols, rows):
    d = GridDomain(cols, rows, 1.0)
    for k in range(d.size + 1):
        exact, _ = oracle_min_free_perimeter(d, k)
        approx, shape = anneal_min_free_perimeter(d, k, seed=k)
        assert len(shape) == k
        assert approx >= exact
        assert approx == exact


def test_anneal_is_deterministic():
    d = GridDomain(7, 9, 1.0)
    sched = AnnealSchedule(sweeps=50)
    a = anneal_min_free_perimeter(d, 20, seed=12, schedule=sched, init="random")
    b = anneal_min_free_perimeter(d, 20, seed=12, schedule=sched, init="random")
    assert a[0] == b[0] and a[1].sorted_cells() == b[1].sorted_cells()


def test_anneal_rejects_bad_k():
    with pytest.raises(DomainError):
        anneal_min_free_perimeter(GridDomain(2, 2, 1.0), 7)
