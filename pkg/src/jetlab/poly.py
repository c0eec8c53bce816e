"""Exact multivariate polynomials, polynomial maps, arcs and truncated series.

Everything in this module is exact: coefficients are ``fractions.Fraction``
and no floating point enters any computation.  A polynomial is stored as a
sparse mapping from dense exponent tuples to nonzero coefficients, so the
zero polynomial is the empty mapping.  Orders of series are plain integers,
``INFINITE`` for an identically zero series, or the ``UNKNOWN`` sentinel when
the series vanishes through its truncation degree without being known to be
zero.  ``UNKNOWN`` propagates pessimistically: arithmetic with it stays
unknown and comparisons against it return ``None`` (inconclusive) so that a
truncation can never manufacture a verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]

INFINITE = math.inf


class _UnknownOrder:
    """Order of a series that vanishes up to its truncation degree."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "UNKNOWN_ORDER"


UNKNOWN = _UnknownOrder()

Order = Union[int, float, _UnknownOrder]


def order_is_known(o: Order) -> bool:
    return not isinstance(o, _UnknownOrder)


def order_min(*orders: Order) -> Order:
    known = [o for o in orders if order_is_known(o)]
    if len(known) != len(orders):
        return UNKNOWN
    return min(known)


def order_add(a: Order, b: Order) -> Order:
    if not (order_is_known(a) and order_is_known(b)):
        return UNKNOWN
    return a + b


def order_scale(k: int, a: Order) -> Order:
    if not order_is_known(a):
        return UNKNOWN
    return k * a


def order_sub(a: Order, b: Order) -> Order:
    """a - b for finite b; inf - finite = inf, inf - inf is indeterminate."""
    if not (order_is_known(a) and order_is_known(b)):
        return UNKNOWN
    if a is INFINITE or a == INFINITE:
        return INFINITE if b != INFINITE else UNKNOWN
    if b == INFINITE:
        raise ValueError("cannot subtract an infinite order from a finite one")
    return a - b


def order_gt(a: Order, b: Order):
    """a > b, or None when either side is unknown."""
    if not (order_is_known(a) and order_is_known(b)):
        return None
    return a > b


def order_ge(a: Order, b: Order):
    if not (order_is_known(a) and order_is_known(b)):
        return None
    return a >= b


def _as_fraction(c: Union[int, str, Fraction]) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Polynomial:
    """Sparse polynomial over the rationals in ``nvars`` variables."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Scalar]):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        clean: Dict[Exponent, Fraction] = {}
        for exp, coeff in terms.items():
            if len(exp) != nvars or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent tuple {exp!r} for nvars={nvars}")
            c = _as_fraction(coeff)
            if c != 0:
                clean[tuple(exp)] = c
        self.nvars = nvars
        self.terms = clean
        self._hash = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "Polynomial":
        return Polynomial(nvars, {})

    @staticmethod
    def constant(nvars: int, c: Scalar) -> "Polynomial":
        return Polynomial(nvars, {(0,) * nvars: c})

    @staticmethod
    def variable(nvars: int, index: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise ValueError(f"variable index {index} out of range for nvars={nvars}")
        exp = tuple(1 if i == index else 0 for i in range(nvars))
        return Polynomial(nvars, {exp: 1})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Total degree, with the convention -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(exp) for exp in self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(
                self, "_hash", hash((self.nvars, frozenset(self.terms.items())))
            )
        return self._hash

    def __repr__(self) -> str:
        from .parsing import polynomial_to_text

        return f"Polynomial({polynomial_to_text(self)!r})"

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomial arity mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for exp, c in other.terms.items():
            s = out.get(exp, Fraction(0)) + c
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return Polynomial.zero(self.nvars)
            return Polynomial(self.nvars, {e: c * v for e, v in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: Dict[Exponent, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                exp = tuple(a + b for a, b in zip(ea, eb))
                s = out.get(exp, Fraction(0)) + ca * cb
                if s:
                    out[exp] = s
                else:
                    out.pop(exp, None)
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- calculus and evaluation -------------------------------------------

    def partial(self, index: int) -> "Polynomial":
        """Partial derivative with respect to variable ``index``."""
        if not 0 <= index < self.nvars:
            raise ValueError("variable index out of range")
        out: Dict[Exponent, Fraction] = {}
        for exp, c in self.terms.items():
            e = exp[index]
            if e == 0:
                continue
            new = list(exp)
            new[index] = e - 1
            out[tuple(new)] = c * e
        return Polynomial(self.nvars, out)

    def eval(self, point: Sequence[Scalar]) -> Fraction:
        """Exact evaluation at a rational point."""
        if len(point) != self.nvars:
            raise ValueError("point arity mismatch")
        xs = [_as_fraction(v) for v in point]
        total = Fraction(0)
        for exp, c in self.terms.items():
            prod = c
            for x, e in zip(xs, exp):
                if e:
                    prod *= x**e
            total += prod
        return total

    def eval_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for exp, c in self.terms.items():
            prod = float(c)
            for x, e in zip(point, exp):
                if e:
                    prod *= x**e
            total += prod
        return total


@dataclass(frozen=True)
class PolyMap:
    """Polynomial map R^n -> R^p, stored as its component polynomials."""

    components: Tuple[Polynomial, ...]

    def __init__(self, components: Iterable[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a polynomial map needs at least one component")
        n = comps[0].nvars
        if any(c.nvars != n for c in comps):
            raise ValueError("components disagree on the number of variables")
        object.__setattr__(self, "components", comps)

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    @property
    def p(self) -> int:
        return len(self.components)

    def eval(self, point: Sequence[Scalar]) -> Tuple[Fraction, ...]:
        return tuple(c.eval(point) for c in self.components)

    def eval_float(self, point: Sequence[float]) -> Tuple[float, ...]:
        return tuple(c.eval_float(point) for c in self.components)

    def total_degree(self) -> int:
        return max(c.total_degree() for c in self.components)

    def __sub__(self, other: "PolyMap") -> "PolyMap":
        if not isinstance(other, PolyMap) or other.p != self.p:
            raise ValueError("map arity mismatch")
        return PolyMap(tuple(a - b for a, b in zip(self.components, other.components)))


def as_poly_map(f: Union[Polynomial, PolyMap]) -> PolyMap:
    return f if isinstance(f, PolyMap) else PolyMap((f,))


def jacobian(f: Union[Polynomial, PolyMap]) -> Tuple[Tuple[Polynomial, ...], ...]:
    """Jacobian matrix as nested tuples; row j holds the partials of f_j."""
    fm = as_poly_map(f)
    return tuple(
        tuple(comp.partial(i) for i in range(fm.nvars)) for comp in fm.components
    )


def _det_poly(rows: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Determinant of a small square matrix of polynomials.

    Laplace expansion along the first row with memoisation on column
    subsets; fine for the sizes that occur here (k <= 6 or so).
    """
    k = len(rows)
    nvars = rows[0][0].nvars if k else 0
    if k == 0:
        return Polynomial.constant(nvars, 1)
    cols0 = tuple(range(k))
    cache: Dict[Tuple[int, Tuple[int, ...]], Polynomial] = {}

    def rec(r: int, cols: Tuple[int, ...]) -> Polynomial:
        if not cols:
            return Polynomial.constant(nvars, 1)
        key = (r, cols)
        hit = cache.get(key)
        if hit is not None:
            return hit
        acc = Polynomial.zero(nvars)
        for pos, c in enumerate(cols):
            entry = rows[r][c]
            if entry.is_zero():
                continue
            sub = rec(r + 1, cols[:pos] + cols[pos + 1 :])
            term = entry * sub
            acc = acc + term if pos % 2 == 0 else acc - term
        cache[key] = acc
        return acc

    return rec(0, cols0)


def minors(
    matrix: Sequence[Sequence[Polynomial]], k: int
) -> Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Polynomial]:
    """All k x k minor determinants of a polynomial matrix.

    Keys are ``(row_indices, column_indices)`` with both tuples strictly
    increasing and 0-based.  ``k = 0`` yields the single empty minor with
    determinant 1.
    """
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    if k < 0:
        raise ValueError("minor size must be nonnegative")
    out: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Polynomial] = {}
    if k > nrows or k > ncols:
        return out
    for rows in combinations(range(nrows), k):
        for cols in combinations(range(ncols), k):
            sub = [[matrix[r][c] for c in cols] for r in rows]
            out[(rows, cols)] = _det_poly(sub)
    return out


# ---------------------------------------------------------------------------
# Arcs and truncated series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    """Polynomial test arc t -> (lambda_1(t), ..., lambda_n(t)) with lambda(0)=0.

    Each component is a tuple of ``(exponent, coefficient)`` pairs with
    strictly increasing exponents >= 1 and nonzero rational coefficients.
    An empty tuple is the identically zero component.
    """

    components: Tuple[Tuple[Tuple[int, Fraction], ...], ...]

    def __init__(self, components: Iterable[Iterable[Tuple[int, Scalar]]]):
        comps = []
        for comp in components:
            terms = tuple((int(e), _as_fraction(c)) for e, c in comp)
            if any(e < 1 for e, _ in terms):
                raise ValueError("arc exponents must be >= 1 so that the arc hits 0")
            if any(c == 0 for _, c in terms):
                raise ValueError("arc coefficients must be nonzero")
            if list(e for e, _ in terms) != sorted({e for e, _ in terms}):
                raise ValueError("arc exponents must be strictly increasing")
            comps.append(terms)
        object.__setattr__(self, "components", tuple(comps))

    @property
    def nvars(self) -> int:
        return len(self.components)

    def component_order(self, i: int) -> Order:
        comp = self.components[i]
        return comp[0][0] if comp else INFINITE

    def max_exponent(self) -> int:
        exps = [e for comp in self.components for e, _ in comp]
        return max(exps) if exps else 1

    def eval_float(self, t: float) -> Tuple[float, ...]:
        return tuple(
            sum(float(c) * t**e for e, c in comp) for comp in self.components
        )

    def eval(self, t: Scalar) -> Tuple[Fraction, ...]:
        tv = _as_fraction(t)
        return tuple(
            sum((c * tv**e for e, c in comp), Fraction(0)) for comp in self.components
        )

    def reparametrized(self, q: int) -> "Arc":
        """The arc t -> lambda(t^q)."""
        if q < 1:
            raise ValueError("reparametrization power must be >= 1")
        return Arc(tuple(tuple((e * q, c) for e, c in comp) for comp in self.components))

    def to_dict(self) -> Dict:
        return {
            "nvars": self.nvars,
            "components": [
                [{"exp": e, "num": c.numerator, "den": c.denominator} for e, c in comp]
                for comp in self.components
            ],
        }


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series in one variable known exactly through degree ``truncation``.

    Storage is sparse: ``terms`` holds the nonzero coefficients at exponents
    up to the truncation degree.  ``exact_zero`` marks the identically zero
    series; without the flag a series with no stored terms merely has order
    beyond the truncation degree (order ``UNKNOWN``).
    """

    truncation: int
    terms: Tuple[Tuple[int, Fraction], ...]
    exact_zero: bool = False

    def __post_init__(self):
        if self.truncation < 0:
            raise ValueError("truncation degree must be nonnegative")
        exps = [e for e, _ in self.terms]
        if exps != sorted(set(exps)):
            raise ValueError("series exponents must be strictly increasing")
        if any(e < 0 or e > self.truncation for e in exps):
            raise ValueError("series exponent outside the truncation window")
        if any(c == 0 for _, c in self.terms):
            raise ValueError("series terms must have nonzero coefficients")
        if self.exact_zero and self.terms:
            raise ValueError("exact zero series with nonzero coefficients")

    @staticmethod
    def zero(truncation: int) -> "TruncatedSeries":
        return TruncatedSeries(truncation, (), True)

    @staticmethod
    def from_coeff_map(
        coeff_map: Mapping[int, Scalar], truncation: int
    ) -> "TruncatedSeries":
        """Series of a polynomial in t given as an exponent -> coefficient map.

        The map is taken as the whole truth: an empty map is the exact zero
        series, while terms beyond the truncation degree are dropped and the
        result merely has unknown order if nothing survives the window.
        """
        clean = {int(e): _as_fraction(c) for e, c in coeff_map.items() if c != 0}
        kept = tuple(sorted((e, c) for e, c in clean.items() if e <= truncation))
        return TruncatedSeries(truncation, kept, not clean)

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        """Dense coefficient tuple of length truncation + 1."""
        out = [Fraction(0)] * (self.truncation + 1)
        for e, c in self.terms:
            out[e] = c
        return tuple(out)

    def coefficient(self, exponent: int) -> Fraction:
        if not 0 <= exponent <= self.truncation:
            raise ValueError("exponent outside the known window")
        for e, c in self.terms:
            if e == exponent:
                return c
        return Fraction(0)

    def order(self) -> Order:
        if self.exact_zero:
            return INFINITE
        if self.terms:
            return self.terms[0][0]
        return UNKNOWN

    def leading_coefficient(self) -> Fraction:
        if not self.terms:
            raise ValueError("series has no known nonzero coefficient")
        return self.terms[0][1]

    def _binop_trunc(self, other: "TruncatedSeries") -> int:
        return min(self.truncation, other.truncation)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = self._binop_trunc(other)
        acc: Dict[int, Fraction] = {}
        for e, c in self.terms:
            if e <= n:
                acc[e] = acc.get(e, Fraction(0)) + c
        for e, c in other.terms:
            if e <= n:
                acc[e] = acc.get(e, Fraction(0)) + c
        kept = tuple(sorted((e, c) for e, c in acc.items() if c))
        return TruncatedSeries(n, kept, self.exact_zero and other.exact_zero)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(
            self.truncation, tuple((e, -c) for e, c in self.terms), self.exact_zero
        )

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def __mul__(self, other) -> "TruncatedSeries":
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return TruncatedSeries.zero(self.truncation)
            return TruncatedSeries(
                self.truncation,
                tuple((e, c * v) for e, v in self.terms),
                self.exact_zero,
            )
        n = self._binop_trunc(other)
        if self.exact_zero or other.exact_zero:
            return TruncatedSeries.zero(n)
        acc: Dict[int, Fraction] = {}
        for ea, ca in self.terms:
            for eb, cb in other.terms:
                e = ea + eb
                if e > n:
                    break  # terms are sorted, later eb only grow
                acc[e] = acc.get(e, Fraction(0)) + ca * cb
        kept = tuple(sorted((e, c) for e, c in acc.items() if c))
        return TruncatedSeries(n, kept, False)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "TruncatedSeries":
        if k < 0:
            raise ValueError("negative power of a series")
        result = TruncatedSeries.from_coeff_map({0: 1}, self.truncation)
        base = self
        for _ in range(k):
            result = result * base
        return result


def default_truncation(r: int, degree: int, max_arc_exponent: int) -> int:
    """Default series truncation: comfortably past every order the checks compare."""
    degree = max(degree, 1)
    return max(8, 4 * max(r, 1) * degree * max(max_arc_exponent, 1))


def compose_arc(
    f: Polynomial, arc: Arc, truncation: int
) -> TruncatedSeries:
    """The exact series of f(lambda(t)) through degree ``truncation``.

    Substitution of a polynomial arc into a polynomial is again a polynomial
    in t, so the composition is computed in full and then truncated; the
    ``exact_zero`` flag on the result is decided from the full composition,
    not from the truncated window.
    """
    if arc.nvars != f.nvars:
        raise ValueError("arc arity does not match the polynomial")
    comp_polys = [dict(comp) for comp in arc.components]
    power_cache: Dict[Tuple[int, int], Dict[int, Fraction]] = {}

    def comp_power(i: int, k: int) -> Dict[int, Fraction]:
        key = (i, k)
        hit = power_cache.get(key)
        if hit is not None:
            return hit
        if k == 0:
            res = {0: Fraction(1)}
        elif k == 1:
            res = comp_polys[i]
        else:
            half = comp_power(i, k // 2)
            res = _poly1_mul(half, half)
            if k % 2:
                res = _poly1_mul(res, comp_polys[i])
        power_cache[key] = res
        return res

    total: Dict[int, Fraction] = {}
    for exp, coeff in f.terms.items():
        prod = {0: coeff}
        dead = False
        for i, e in enumerate(exp):
            if e == 0:
                continue
            factor = comp_power(i, e)
            if not factor:
                dead = True
                break
            prod = _poly1_mul(prod, factor)
        if dead:
            continue
        for e, c in prod.items():
            s = total.get(e, Fraction(0)) + c
            if s:
                total[e] = s
            else:
                total.pop(e, None)
    kept = tuple(sorted((e, c) for e, c in total.items() if e <= truncation))
    return TruncatedSeries(truncation, kept, exact_zero=not total)


def _poly1_mul(a: Dict[int, Fraction], b: Dict[int, Fraction]) -> Dict[int, Fraction]:
    out: Dict[int, Fraction] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            s = out.get(e, Fraction(0)) + ca * cb
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def jet_vanishes_on_sigma(f: Union[Polynomial, PolyMap], sigma, r: int) -> bool:
    """Whether every partial of f up to total order r vanishes identically on sigma.

    ``sigma`` is a finite union of coordinate subspaces (anything exposing a
    ``pieces`` attribute of frozensets of forced variable indices).  For such
    a set the condition is combinatorial: a partial derivative of a monomial
    survives restriction to a piece exactly when differentiation removes all
    of its powers of forced variables, so the jet vanishes iff every term of
    every component has total degree >= r + 1 in the forced variables of
    every piece.
    """
    if r < 0:
        raise ValueError("jet order must be nonnegative")
    fm = as_poly_map(f)
    for piece in sigma.pieces:
        for comp in fm.components:
            for exp in comp.terms:
                if sum(exp[i] for i in piece) < r + 1:
                    return False
    return True
