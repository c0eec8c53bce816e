"""Text and dict forms of polynomials, maps, and sigma sets."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from jetlab.parsing import (
    ParseError,
    map_from_dict,
    map_to_dict,
    map_to_text,
    parse_poly_map,
    parse_polynomial,
    parse_sigma,
    poly_from_dict,
    poly_to_dict,
    polynomial_to_text,
    sigma_from_dict,
    sigma_to_dict,
    sigma_to_text,
)
from jetlab.poly import Polynomial, PolyMap
from jetlab.sigma import SigmaSet


# --- parsing ------------------------------------------------------------------


def test_parse_standard_form():
    p = parse_polynomial("x^3 - 3*x*y^5")
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    assert p == x**3 - 3 * x * y**5


def test_parse_rational_coefficients():
    p = parse_polynomial("1/2*x^2 - y")
    assert p.eval((Fraction(2), Fraction(0))) == 2


def test_parse_numbered_variables_infer_arity():
    p = parse_polynomial("x1*x4^2")
    assert p.nvars == 4


def test_parse_explicit_nvars_pads():
    p = parse_polynomial("x", nvars=3)
    assert p.nvars == 3


def test_parse_rejects_too_small_nvars():
    with pytest.raises(ParseError):
        parse_polynomial("x*y", nvars=1)


def test_parse_error_carries_column():
    with pytest.raises(ParseError) as exc_info:
        parse_polynomial("x^")
    assert exc_info.value.column == 3
    assert "(column 3)" in str(exc_info.value)


def test_parse_zero_denominator():
    with pytest.raises(ParseError, match="zero denominator"):
        parse_polynomial("1/0*x")


def test_parse_garbage_token():
    with pytest.raises(ParseError):
        parse_polynomial("x + $")


# --- emission -------------------------------------------------------------------


def test_emit_pinned_forms():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    assert polynomial_to_text(x**3 - 3 * x * y**5) == "x^3 - 3*x*y^5"
    assert polynomial_to_text(Polynomial.zero(2)) == "0"
    assert polynomial_to_text(-x) == "-x"
    assert polynomial_to_text(Fraction(1, 2) * x**2 - y) == "1/2*x^2 - y"


def test_emit_numbered_names_beyond_three_vars():
    q = Polynomial.variable(4, 3)
    assert polynomial_to_text(q) == "x4"


coeffs = st.integers(-9, 9).filter(bool).map(Fraction)


@st.composite
def random_polys(draw):
    nvars = draw(st.integers(1, 3))
    p = Polynomial.zero(nvars)
    for _ in range(draw(st.integers(0, 5))):
        exps = tuple(draw(st.integers(0, 4)) for _ in range(nvars))
        mono = Polynomial(nvars, {exps: draw(coeffs)})
        p = p + mono
    return p


@given(random_polys())
def test_text_round_trip(p):
    assert parse_polynomial(polynomial_to_text(p), nvars=p.nvars) == p


@given(st.lists(random_polys(), min_size=1, max_size=3))
def test_map_text_round_trip(comps):
    nvars = max(c.nvars for c in comps)
    fm = parse_poly_map("; ".join(polynomial_to_text(c) for c in comps))
    # emission uses the inferred arity, which may be below nvars when a
    # trailing variable never appears; compare componentwise at that arity
    assert fm.p == len(comps)
    back = parse_poly_map(map_to_text(fm))
    assert back == fm


def test_map_components_widen_to_common_arity():
    fm = parse_poly_map("x; y*z")
    assert fm.nvars == 3
    assert fm.p == 2
    assert map_to_text(fm) == "x; y*z"


# --- sigma text ---------------------------------------------------------------------


def test_sigma_text_forms():
    s = parse_sigma("{x=0} | {y=0, z=0}", nvars=3)
    assert s.piece_lists() == ((0,), (1, 2))
    assert sigma_to_text(s) == "{x=0}|{y=0, z=0}"


def test_sigma_origin_shorthand():
    assert parse_sigma("origin", nvars=2) == SigmaSet.origin(2)
    with pytest.raises(ParseError):
        parse_sigma("origin", nvars=None)


def test_sigma_rejects_nonzero_equation():
    with pytest.raises(ParseError):
        parse_sigma("{x=1}", nvars=2)


def test_sigma_round_trip():
    for text in ("{x=0}", "{x=0, y=0}", "{x=0}|{y=0}"):
        s = parse_sigma(text, nvars=2)
        assert parse_sigma(sigma_to_text(s), nvars=2) == s


# --- dict forms -----------------------------------------------------------------------


@given(random_polys())
def test_poly_dict_round_trip(p):
    assert poly_from_dict(poly_to_dict(p)) == p


def test_map_dict_round_trip():
    fm = parse_poly_map("x - y^2; x^2")
    data = map_to_dict(fm)
    assert data["nvars"] == 2
    assert map_from_dict(data) == fm


def test_sigma_dict_round_trip():
    s = parse_sigma("{x=0}|{y=0, z=0}", nvars=3)
    data = sigma_to_dict(s)
    # pieces use 1-based variable numbers on the wire
    assert data["pieces"] == [[1], [2, 3]]
    assert sigma_from_dict(data) == s


def test_malformed_dicts_raise_value_errors():
    with pytest.raises(ValueError):
        poly_from_dict({"nvars": 2})
    with pytest.raises(ValueError):
        poly_from_dict({"nvars": 2, "terms": [{"exp": [1, 0]}]})
    with pytest.raises(ValueError):
        map_from_dict({"components": [[]]})
    with pytest.raises(ValueError):
        sigma_from_dict({"nvars": 2})
