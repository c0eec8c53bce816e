"""Condition checks: shell-ladder estimation plus exact arc refutation."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jetlab import measures
from jetlab.arcs import ArcProfile, arc_violates, profile_arc
from jetlab.conditions import (
    CheckConfig,
    LojaConfig,
    PolynomialTarget,
    arc_ratio_table,
    check_ktilde,
    check_ktilde_delta,
    check_kuiper_kuo,
    check_kuo_horn,
    check_second_kuiper_kuo,
    ellipticity_check,
    loja_exponent,
    thom_check,
)
from jetlab.poly import Arc, Polynomial, PolyMap
from jetlab.sigma import SigmaSet, horn_contains, HornSpec
from jetlab.verdicts import FAILS, HOLDS, INCONCLUSIVE

X_AXIS = SigmaSet(2, [(0,)])

# trimmed ladder for unit tests; the default one is exercised in the
# acceptance suite where the timing budgets live
QUICK = CheckConfig(
    loja=LojaConfig(
        shells=tuple(2.0**-k for k in range(3, 9)),
        samples_per_shell=80,
        refine_steps=20,
        refine_starts=2,
        drop_coarsest=1,
    )
)


def _family(m):
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    return x**3 - 3 * x * y**m


# --- shell-ladder exponent fits -------------------------------------------------


def test_loja_recovers_a_pure_power():
    x = Polynomial.variable(2, 0)
    fit = loja_exponent(PolynomialTarget(x**2, "x^2"), X_AXIS, QUICK.loja)
    assert fit.alpha_hat == pytest.approx(2.0, abs=1e-6)
    assert fit.c_hat == pytest.approx(1.0, rel=1e-6)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert not fit.degenerate_eps


def test_loja_flat_ladder_reports_zero_exponent():
    five = Polynomial.constant(2, 5)
    fit = loja_exponent(PolynomialTarget(five, "five"), X_AXIS, QUICK.loja)
    assert fit.alpha_hat == 0.0
    assert fit.c_hat == pytest.approx(5.0)
    assert fit.r_squared == 1.0


def test_loja_degenerate_shells_yield_no_fit():
    y = Polynomial.variable(2, 1)
    fit = loja_exponent(PolynomialTarget(y**2, "y^2"), X_AXIS, QUICK.loja)
    assert fit.alpha_hat is None
    assert len(fit.degenerate_eps) == len(QUICK.loja.shells)


def test_loja_is_seed_deterministic():
    f = _family(3)
    a = loja_exponent(PolynomialTarget(f, "f"), X_AXIS, QUICK.loja)
    b = loja_exponent(PolynomialTarget(f, "f"), X_AXIS, QUICK.loja)
    assert a.alpha_hat == b.alpha_hat
    assert a.minima == b.minima


# --- exact refutation, estimated support ----------------------------------------


def test_kk_fails_on_the_family_with_reverified_witness():
    verdict = check_kuiper_kuo(_family(3), X_AXIS, 3, QUICK)
    assert verdict.status == FAILS
    prof = verdict.witness_profile
    assert (prof.ord_d, prof.ord_kappa, prof.ord_f) == (3, 7, 9)
    again = profile_arc(_family(3), X_AXIS, verdict.witness, 3)
    assert (again.ord_d, again.ord_kappa, again.ord_f) == (3, 7, 9)
    assert arc_violates("kk", again) is True


def test_kk_holds_for_the_clean_cubic():
    x = Polynomial.variable(2, 0)
    verdict = check_kuiper_kuo(x**3, X_AXIS, 3, QUICK)
    assert verdict.status == HOLDS
    assert verdict.mode == "combined"
    # kappa ~ 3 x^2 on the shell, so the fitted decay exponent is r - 1
    assert verdict.alpha_hat == pytest.approx(2.0, abs=0.1)


def test_kk_delta_holds_with_exact_margin():
    verdict = check_second_kuiper_kuo(_family(3), X_AXIS, 3, QUICK)
    assert verdict.status == HOLDS
    assert verdict.delta_estimate == Fraction(2, 3)


def test_ktilde_holds_where_kk_fails():
    verdict = check_ktilde(_family(3), X_AXIS, 3, QUICK)
    assert verdict.status == HOLDS


def test_ktilde_delta_boundary_is_inconclusive():
    x1 = Polynomial.variable(1, 0)
    verdict = check_ktilde_delta(x1**3, SigmaSet(1, [(0,)]), 2, QUICK)
    assert verdict.status == INCONCLUSIVE
    assert verdict.diagnostics.get("boundary_only") is True
    assert "boundary_witness" in verdict.diagnostics
    assert verdict.delta_estimate == 0


profiles = st.tuples(
    st.integers(1, 4),  # ord_d
    st.integers(1, 20),  # ord_kappa
    st.integers(1, 24),  # ord_f
    st.integers(1, 4),  # r
)


@given(profiles)
def test_violation_monotonicity_across_conditions(quad):
    """A stronger refutation on an arc implies the weaker ones.

    min(d + kappa, f) > r d forces kappa > (r-1) d, and the same one step
    higher, so a ktilde witness is always a kk witness and a ktilde-delta
    witness always a kk-delta witness; demanding a whole delta of margin
    lost (kk-delta) in particular breaks the plain strict bound (kk).
    """
    ord_d, ord_kappa, ord_f, r = quad
    arc = Arc([[(1, 1)], [(1, 1)]])
    prof = ArcProfile(
        arc=arc, r=r, ord_d=ord_d, ord_f=ord_f, ord_kappa=ord_kappa, truncation=99
    )
    if arc_violates("ktilde", prof):
        assert arc_violates("kk", prof)
    if arc_violates("ktilde-delta", prof):
        assert arc_violates("kk-delta", prof)
    if arc_violates("kk-delta", prof):
        assert arc_violates("kk", prof)


# --- horn-restricted check --------------------------------------------------------


def test_kuo_horn_holds_for_the_clean_cubic():
    x = Polynomial.variable(2, 0)
    verdict = check_kuo_horn(x**3, X_AXIS, 3, width=1, config=QUICK)
    assert verdict.status == HOLDS
    assert verdict.alpha_hat == pytest.approx(2.0, abs=0.05)


def test_kuo_horn_fails_on_the_family():
    # inside the horn the gradient decays measurably faster than the
    # d^(r-1) the condition asks for, even though the relative variants
    # hold; this is the separating example for the horn check
    verdict = check_kuo_horn(_family(3), X_AXIS, 3, width=1, config=QUICK)
    assert verdict.status == FAILS
    assert verdict.alpha_hat > 2.15


def test_kuo_horn_empty_horn_is_inconclusive():
    x1 = Polynomial.variable(1, 0)
    verdict = check_kuo_horn(PolyMap([x1]), SigmaSet(1, [(0,)]), 2, width=1, config=QUICK)
    assert verdict.status == INCONCLUSIVE
    assert verdict.diagnostics["shells_with_horn_points"] == 0


def test_kuo_horn_rank_collapse_gives_exact_witness():
    # the gradient of x^2 vanishes along the y axis, which crosses the horn
    # around {y = 0}; the witness point is checked exactly, not by fit
    x = Polynomial.variable(2, 0)
    sigma = SigmaSet(2, [(1,)])
    verdict = check_kuo_horn(x**2, sigma, 2, width=1, config=QUICK)
    assert verdict.status == FAILS
    pt = tuple(Fraction(v) for v in verdict.witness)
    assert measures.kuo_kappa_squared(measures.jacobian_at(x**2, pt)) == 0
    assert not sigma.contains(pt)
    horn = HornSpec(f=x**2, sigma=sigma, degree=2, width=Fraction(1))
    assert horn_contains(pt, horn)


# --- ideal ellipticity and the thom fit ---------------------------------------------


def test_elliptic_generators_hold():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    verdict = ellipticity_check([x, y], SigmaSet.origin(2), QUICK)
    assert verdict.status == HOLDS
    assert verdict.alpha_hat == pytest.approx(2.0, abs=1e-6)


def test_elliptic_fails_with_a_zero_witness():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    verdict = ellipticity_check([x * y], SigmaSet.origin(2), QUICK)
    assert verdict.status == FAILS
    # the witness is an exact zero of the generator system off sigma
    wx, wy = (Fraction(v) for v in verdict.witness)
    assert (x * y).eval((wx, wy)) == 0
    assert (wx, wy) != (0, 0)


def test_thom_fit_against_target_exponent():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    kt = PolyMap([x - y**2, x**2])
    origin = SigmaSet.origin(2)
    good = thom_check(kt, origin, 8, QUICK)
    assert good.status == HOLDS
    assert good.alpha_hat == pytest.approx(8.0, abs=0.15)
    bad = thom_check(kt, origin, 2, QUICK)
    assert bad.status == FAILS


# --- diagnostic ratio table -----------------------------------------------------------


def test_arc_ratio_table_decays_along_a_witness():
    f = _family(3)
    arc = Arc([[(3, 1)], [(2, 1)]])
    table = arc_ratio_table(f, X_AXIS, 3, "kk", arc, ks=(3, 4, 5, 6, 7))
    eps_values = [eps for eps, _ in table]
    ratios = [ratio for _, ratio in table]
    assert eps_values == [2.0**-k for k in (3, 4, 5, 6, 7)]
    assert all(b < a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < ratios[0] / 4
