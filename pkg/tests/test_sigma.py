"""Unions of coordinate subspaces: distances, membership, shells, horns."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jetlab.poly import Arc, INFINITE, Polynomial
from jetlab.sigma import (
    HornSpec,
    ShellSamplingError,
    SigmaSet,
    horn_contains,
    sample_shell,
    shell_grid_points,
)


def test_superset_pieces_are_pruned():
    s = SigmaSet(2, [(0,), (0, 1)])
    assert s.piece_lists() == ((0,),)


def test_duplicate_pieces_collapse():
    s = SigmaSet(3, [(1, 0), (0, 1)])
    assert s.piece_lists() == ((0, 1),)


def test_empty_piece_rejected():
    with pytest.raises(ValueError):
        SigmaSet(2, [()])
    with pytest.raises(ValueError):
        SigmaSet(2, [(2,)])


def test_origin_forces_all_coordinates():
    s = SigmaSet.origin(3)
    assert s.piece_lists() == ((0, 1, 2),)


def test_distance_to_single_subspace():
    s = SigmaSet(2, [(0,)])
    assert s.distance_squared_exact((Fraction(3), Fraction(7))) == 9
    assert s.distance((3.0, 7.0)) == pytest.approx(3.0)


def test_distance_to_union_is_min_over_pieces():
    s = SigmaSet(2, [(0,), (1,)])
    assert s.distance_squared_exact((Fraction(3), Fraction(2))) == 4
    assert s.distance((2.0, -5.0)) == pytest.approx(2.0)


def test_contains_is_exact():
    s = SigmaSet(2, [(0,)])
    assert s.contains((Fraction(0), Fraction(5)))
    assert not s.contains((Fraction(1, 10**12), Fraction(0)))


point_arrays = st.lists(
    st.tuples(
        st.floats(-4, 4, allow_nan=False),
        st.floats(-4, 4, allow_nan=False),
        st.floats(-4, 4, allow_nan=False),
    ),
    min_size=1,
    max_size=8,
)


@given(point_arrays)
def test_vectorized_distances_match_scalar(pts):
    s = SigmaSet(3, [(0, 1), (2,)])
    arr = np.asarray(pts, dtype=float)
    vec = s.distances(arr)
    for row, d in zip(pts, vec):
        assert d == pytest.approx(s.distance(row), rel=1e-12, abs=1e-12)


# --- distance order along arcs -------------------------------------------------


def test_distance_order_single_piece_is_min_component_order():
    s = SigmaSet(2, [(0,)])
    arc = Arc([[(3, 1)], [(2, 1)]])
    # only the x coordinate is forced to zero on the piece
    assert s.distance_order_along_arc(arc) == 3


def test_distance_order_origin_piece():
    s = SigmaSet.origin(2)
    arc = Arc([[(3, 1)], [(2, 1)]])
    assert s.distance_order_along_arc(arc) == 2


def test_distance_order_union_takes_the_nearest_piece():
    # the union distance is the min over pieces, and for small t the piece
    # the arc approaches fastest wins that min, so the vanishing order is
    # the max of the per-piece orders: min(t^3, t^2) = t^3 near zero
    s = SigmaSet(2, [(0,), (1,)])
    arc = Arc([[(3, 1)], [(2, 1)]])
    assert s.distance_order_along_arc(arc) == 3


def test_distance_order_inside_sigma_is_infinite():
    s = SigmaSet(2, [(0,)])
    arc = Arc([[], [(1, 1)]])
    assert s.distance_order_along_arc(arc) == INFINITE


@given(st.integers(1, 4), st.integers(1, 4), st.integers(2, 3))
def test_distance_order_scales_under_reparametrization(e0, e1, q):
    s = SigmaSet(2, [(0,), (1,)])
    arc = Arc([[(e0, 1)], [(e1, -2)]])
    base = s.distance_order_along_arc(arc)
    assert s.distance_order_along_arc(arc.reparametrized(q)) == q * base


# --- shell sampling -------------------------------------------------------------


def test_shell_grid_points_lie_on_shell():
    s = SigmaSet(2, [(0,)])
    eps = 0.125
    pts = shell_grid_points(s, eps)
    assert pts
    for pt in pts:
        assert s.distance(pt) == pytest.approx(eps, rel=1e-12)


def test_sample_shell_distances_and_count():
    s = SigmaSet(2, [(0,)])
    eps = 1 / 64
    pts = sample_shell(s, eps, 200, rng=0)
    assert len(pts) == 200
    dists = s.distances(pts)
    assert np.allclose(dists, eps, rtol=1e-9)
    assert np.max(np.abs(pts)) <= 0.5 + 1e-12


def test_sample_shell_union_respects_both_pieces():
    s = SigmaSet(2, [(0,), (1,)])
    eps = 1 / 32
    pts = sample_shell(s, eps, 300, rng=1)
    dists = s.distances(pts)
    assert np.allclose(dists, eps, rtol=1e-9)


def test_sample_shell_is_seed_deterministic():
    s = SigmaSet(3, [(0, 1)])
    a = sample_shell(s, 0.25, 64, rng=7)
    b = sample_shell(s, 0.25, 64, rng=7)
    assert np.array_equal(a, b)


def test_sample_shell_rejects_infeasible_box():
    # with several pieces the sampler needs room inside the box to keep the
    # other pieces farther away than eps; a box smaller than the shell radius
    # leaves none
    s = SigmaSet(2, [(0,), (1,)])
    with pytest.raises(ShellSamplingError):
        sample_shell(s, 0.75, 16, rng=0)


# --- horn neighbourhoods ----------------------------------------------------------


def _horn():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    f = x**3 - 3 * x * y**3
    return HornSpec(f=f, sigma=SigmaSet(2, [(0,)]), degree=3, width=Fraction(1))


def test_horn_contains_is_exact_at_the_boundary():
    horn = _horn()
    # on the x axis piece the distance is |x|; pick y = 0 so f = x^3 exactly
    assert horn_contains((Fraction(1, 2), Fraction(0)), horn)
    assert horn_contains((Fraction(-1, 2), Fraction(0)), horn)


def test_horn_excludes_points_with_large_values():
    horn = _horn()
    # f(1/2, 1) = 1/8 - 3/2 is far bigger than (1/2)^3
    assert not horn_contains((Fraction(1, 2), Fraction(1)), horn)


def test_horn_width_scales_membership():
    x = Polynomial.variable(1, 0)
    sigma = SigmaSet(1, [(0,)])
    narrow = HornSpec(f=x, sigma=sigma, degree=2, width=Fraction(1))
    wide = HornSpec(f=x, sigma=sigma, degree=2, width=Fraction(100))
    pt = (Fraction(1, 10),)
    # |f| = 1/10 vs w * (1/10)^2 = w/100
    assert not horn_contains(pt, narrow)
    assert horn_contains(pt, wide)
