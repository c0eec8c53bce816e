"""Pointwise regularity measures and the exact Kuo and Thom quantities."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jetlab import measures
from jetlab.poly import Polynomial, PolyMap
from jetlab.sigma import SigmaSet


def _kt_map():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    return PolyMap([x - y**2, x**2])


# --- exact linear-algebra helpers ---------------------------------------------


def test_gram_det_of_orthogonal_rows():
    assert measures.gram_det([[2, 0, 0], [0, 3, 0]]) == 36


def test_dist_sq_to_span_simple():
    assert measures.dist_sq_to_span([1, 1], [[1, 0]]) == 1
    assert measures.dist_sq_to_span([1, 1], []) == 2


def test_kappa_squared_pins():
    assert measures.kuo_kappa_squared([[1, 0, 0], [0, 1, 0]]) == 1
    assert measures.kuo_kappa_squared([[2, 0], [0, 3]]) == 4
    assert measures.kuo_kappa_squared([[1, 2], [2, 4]]) == 0
    assert measures.kuo_kappa_squared([[3, 4]]) == 25


def test_kappa_squared_is_exact_fraction():
    k2 = measures.kuo_kappa_squared([[Fraction(1, 3), 1], [0, Fraction(1, 7)]])
    assert isinstance(k2, Fraction)
    assert measures.kuo_kappa([[Fraction(1, 3), 1], [0, Fraction(1, 7)]]) == pytest.approx(
        math.sqrt(float(k2))
    )


matrix_entries = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@st.composite
def small_matrices(draw, max_p=3, max_n=4):
    p = draw(st.integers(1, max_p))
    n = draw(st.integers(p, max_n))
    return [[draw(matrix_entries) for _ in range(n)] for _ in range(p)]


def _span_distance_oracle(v, rows):
    """Distance from v to the span of rows, via an SVD orthonormal basis."""
    v = np.asarray(v, dtype=float)
    if not rows:
        return float(np.linalg.norm(v))
    a = np.asarray(rows, dtype=float)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    rank = int(np.sum(s > max(a.shape) * np.finfo(float).eps * (s[0] if s.size else 1.0)))
    basis = vt[:rank]
    resid = v - basis.T @ (basis @ v)
    return float(np.linalg.norm(resid))


@given(small_matrices())
@settings(max_examples=150)
def test_kappa_matches_projection_oracle(mat):
    kappa = measures.kuo_kappa(mat)
    expected = min(
        _span_distance_oracle(row, mat[:j] + mat[j + 1 :]) for j, row in enumerate(mat)
    )
    assert kappa == pytest.approx(expected, rel=1e-9, abs=1e-9)


# --- spectral measures -----------------------------------------------------------


def test_nu_pins():
    assert measures.rabier_nu([[1, 0], [0, 1]]) == pytest.approx(1.0)
    assert measures.rabier_nu([[2, 0], [0, 3]]) == pytest.approx(2.0)
    assert measures.rabier_nu([[1, 1], [1, 1]]) == pytest.approx(0.0, abs=1e-12)
    assert measures.rabier_nu([[3, 4]]) == pytest.approx(5.0)


@given(small_matrices())
@settings(max_examples=150)
def test_nu_is_smallest_singular_value(mat):
    svals = np.linalg.svd(np.asarray(mat, dtype=float), compute_uv=False)
    assert measures.rabier_nu(mat) == pytest.approx(float(svals[-1]), abs=1e-9)


@given(small_matrices())
@settings(max_examples=100)
def test_singular_values_match_numpy(mat):
    mine = measures.singular_values(mat)
    ref = np.linalg.svd(np.asarray(mat, dtype=float), compute_uv=False)
    assert np.allclose(np.sort(mine)[::-1], ref, atol=1e-9)


@given(small_matrices())
@settings(max_examples=100)
def test_operator_norm_matches_numpy(mat):
    assert measures.operator_norm(mat) == pytest.approx(
        float(np.linalg.norm(np.asarray(mat, dtype=float), 2)), abs=1e-9
    )


def test_eta_pins():
    assert measures.eta([[2, 0], [0, 3]]) == pytest.approx(6 / math.sqrt(13))
    assert measures.eta([[3, 4]]) == pytest.approx(5.0)
    assert measures.eta([[0, 0], [0, 0]]) == pytest.approx(0.0)


def test_eta_tilde_pins():
    assert measures.eta_tilde([[2, 0], [0, 3]]) == pytest.approx(2.0)
    assert measures.eta_tilde([[3, 4]]) == pytest.approx(4.0)
    # 0/0 blocks contribute nothing rather than poisoning the max
    assert measures.eta_tilde([[0, 0], [0, 0]]) == pytest.approx(0.0)


@given(small_matrices())
@settings(max_examples=200)
def test_measure_sandwiches(mat):
    p = len(mat)
    root_p = math.sqrt(p)
    kappa = measures.kuo_kappa(mat)
    nu = measures.rabier_nu(mat)
    eta = measures.eta(mat)
    slack = 1 + 1e-9
    # kappa is exact while nu comes from a float svd, so allow roundoff
    # noise proportional to the size of the measures involved
    floor = 1e-9 * (1.0 + kappa + nu + eta)
    assert nu <= kappa * slack + floor
    assert kappa <= root_p * nu * slack + floor
    assert eta <= kappa * slack + floor
    assert kappa <= root_p * eta * slack + floor


@given(small_matrices(), st.data())
@settings(max_examples=100)
def test_nu_is_one_lipschitz_in_operator_norm(mat, data):
    p, n = len(mat), len(mat[0])
    pert = [
        [data.draw(st.floats(-0.5, 0.5, allow_nan=False)) for _ in range(n)]
        for _ in range(p)
    ]
    summed = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(mat, pert)]
    lower = measures.rabier_nu(mat) - measures.operator_norm(pert)
    assert measures.rabier_nu(summed) >= lower - 1e-9


def test_measure_report_is_consistent():
    rep = measures.measure_report(_kt_map(), (Fraction(1), Fraction(1)))
    assert rep.p == 2 and rep.n == 2
    assert rep.kappa == pytest.approx(math.sqrt(float(rep.kappa_squared)))
    assert rep.sandwich_violations() == []


def test_jacobian_at_is_exact():
    assert measures.jacobian_at(_kt_map(), (Fraction(1), Fraction(1))) == [
        [Fraction(1), Fraction(-2)],
        [Fraction(2), Fraction(0)],
    ]


# --- Kuo and Thom quantities ------------------------------------------------------


def test_kuo_and_thom_pinned_values():
    f = _kt_map()
    assert measures.kuo_quantity(f, (Fraction(1), Fraction(1)), 2) == Fraction(33)
    assert measures.thom_quantity(f, (Fraction(1), Fraction(1)), 2) == Fraction(1)


def test_even_m_quantities_are_exact_fractions():
    f = _kt_map()
    pt = (Fraction(1, 3), Fraction(-1, 2))
    k = measures.kuo_quantity(f, pt, 2)
    t = measures.thom_quantity(f, pt, 2)
    assert isinstance(k, Fraction) and isinstance(t, Fraction)


def test_odd_m_quantities_are_floats():
    f = _kt_map()
    k = measures.kuo_quantity(f, (Fraction(1), Fraction(1)), 3)
    assert isinstance(k, float)


def test_quantity_polynomials_agree_with_pointwise_values():
    f = _kt_map()
    kp = measures.kuo_quantity_polynomial(f, 2)
    tp = measures.thom_quantity_polynomial(f, 2)
    for pt in [(Fraction(1), Fraction(1)), (Fraction(-1, 2), Fraction(1, 3))]:
        assert kp.eval(pt) == measures.kuo_quantity(f, pt, 2)
        assert tp.eval(pt) == measures.thom_quantity(f, pt, 2)


rational_points = st.tuples(
    st.fractions(min_value=-2, max_value=2, max_denominator=6),
    st.fractions(min_value=-2, max_value=2, max_denominator=6),
)


@given(rational_points)
@settings(max_examples=60)
def test_kuo_dominates_thom_for_square_systems(pt):
    f = _kt_map()
    assert measures.kuo_quantity(f, pt, 2) >= measures.thom_quantity(f, pt, 2)


# --- shell ratio scans --------------------------------------------------------------


def test_ratio_scan_on_the_pinned_pair():
    f = _kt_map()
    shells = [2.0**-k for k in range(3, 7)]
    res = measures.km_tm_ratio_scan(f, 2, shells, samples_per_shell=200, seed=0)
    assert res.m == 2
    assert len(res.shells) == 4
    assert res.global_min() >= 1
    assert res.global_max() <= 100
    for shell in res.shells:
        assert shell.min_ratio <= shell.max_ratio
        assert shell.argmin is not None and shell.argmax is not None


def test_ratio_scan_is_seed_deterministic():
    f = _kt_map()
    shells = [0.125, 0.0625]
    a = measures.km_tm_ratio_scan(f, 2, shells, samples_per_shell=64, seed=3)
    b = measures.km_tm_ratio_scan(f, 2, shells, samples_per_shell=64, seed=3)
    assert a.global_min() == b.global_min()
    assert a.global_max() == b.global_max()


def test_ratio_scan_rejects_degenerate_denominator():
    zero = PolyMap([Polynomial.zero(2)])
    with pytest.raises(ValueError):
        measures.km_tm_ratio_scan(zero, 2, [0.125], samples_per_shell=16, seed=0)


def test_ratio_scan_skips_isolated_zero_samples():
    # where the map (y^2,) meets the x axis both quantities vanish; those
    # shell samples are skipped, the rest carry the statistics
    y = Polynomial.variable(2, 1)
    f = PolyMap([y**2])
    sigma = SigmaSet(2, [(0,)])
    res = measures.km_tm_ratio_scan(
        f, 2, [0.125], samples_per_shell=100, seed=2, sigma=sigma
    )
    assert res.shells[0].skipped >= 2
    assert res.global_min() > 0
