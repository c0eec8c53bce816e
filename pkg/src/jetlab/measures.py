"""Degeneracy measures of linear maps and the derived pointwise quantities.

The Kuo distance kappa(v_1, ..., v_p) = min_i dist(v_i, span of the others)
and the Rabier function nu (the smallest singular value) measure how far a
p x n matrix is from the set of non-surjective maps; eta is the minor-ratio
surrogate sqrt(sum of squared p-minors / sum of squared (p-1)-minors).  All
three agree up to factors of sqrt(p):

    nu <= kappa <= sqrt(p) nu        and        eta <= kappa <= sqrt(p) eta.

Exact paths work over the rationals (floats are lifted exactly, so float
inputs lose nothing); nu is iterative by nature and is computed by a
one-sided Jacobi orthogonalization of the rows, which preserves singular
values and determines even tiny ones to high relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .poly import PolyMap, Polynomial, Scalar, as_poly_map, jacobian, minors
from .sigma import SigmaSet, sample_shell

Matrix = Sequence[Sequence[Union[int, float, Fraction]]]


def _lift(matrix: Matrix) -> List[List[Fraction]]:
    return [[Fraction(v) for v in row] for row in matrix]


def _fraction_det(mat: List[List[Fraction]]) -> Fraction:
    """Exact determinant by Gaussian elimination with nonzero pivoting."""
    k = len(mat)
    if k == 0:
        return Fraction(1)
    m = [row[:] for row in mat]
    det = Fraction(1)
    for col in range(k):
        pivot = next((r for r in range(col, k) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, k):
            if m[r][col] != 0:
                factor = m[r][col] * inv
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return det


def gram_det(vectors: Matrix) -> Fraction:
    """Exact Gram determinant det(<v_i, v_j>)."""
    rows = _lift(vectors)
    gram = [
        [sum((a * b for a, b in zip(u, w)), Fraction(0)) for w in rows] for u in rows
    ]
    return _fraction_det(gram)


def _norm_sq(v: List[Fraction]) -> Fraction:
    return sum((a * a for a in v), Fraction(0))


def _independent_subset(vectors: List[List[Fraction]]) -> List[List[Fraction]]:
    """Greedy maximal independent subset, largest squared norm first."""
    order = sorted(range(len(vectors)), key=lambda i: (-_norm_sq(vectors[i]), i))
    basis: List[List[Fraction]] = []
    for i in order:
        candidate = basis + [vectors[i]]
        if gram_det(candidate) > 0:
            basis = candidate
    return basis


def dist_sq_to_span(v: Sequence[Union[int, float, Fraction]], others: Matrix) -> Fraction:
    """Exact squared distance from v to the span of the other vectors."""
    vf = [Fraction(x) for x in v]
    basis = _independent_subset(_lift(others))
    if not basis:
        return _norm_sq(vf)
    denom = gram_det(basis)
    numer = gram_det(basis + [vf])
    return numer / denom


def kuo_kappa_squared(matrix: Matrix) -> Fraction:
    """Exact square of the Kuo distance of the rows."""
    rows = _lift(matrix)
    if not rows:
        raise ValueError("kappa needs at least one row")
    best: Optional[Fraction] = None
    for i in range(len(rows)):
        others = rows[:i] + rows[i + 1 :]
        d2 = dist_sq_to_span(rows[i], others)
        if best is None or d2 < best:
            best = d2
    return best


def kuo_kappa(matrix: Matrix) -> float:
    return math.sqrt(float(kuo_kappa_squared(matrix)))


# -- Rabier function ---------------------------------------------------------


def singular_values(matrix: Matrix, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """Singular values (descending) via one-sided Jacobi rotations on the rows.

    Left rotations A <- J A preserve singular values; once the rows are
    mutually orthogonal their norms are the singular values.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    p = a.shape[0]
    if p == 1:
        return np.array([float(np.linalg.norm(a[0]))])
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(p - 1):
            for j in range(i + 1, p):
                aii = float(a[i] @ a[i])
                ajj = float(a[j] @ a[j])
                aij = float(a[i] @ a[j])
                scale = math.sqrt(aii * ajj)
                if scale == 0.0 or abs(aij) <= 1e-15 * scale:
                    continue
                off = max(off, abs(aij) / scale)
                theta = 0.5 * math.atan2(2.0 * aij, aii - ajj)
                c, s = math.cos(theta), math.sin(theta)
                ri = c * a[i] + s * a[j]
                rj = -s * a[i] + c * a[j]
                a[i], a[j] = ri, rj
        if off <= tol * 1e-2:
            break
    sv = np.sort(np.linalg.norm(a, axis=1))[::-1]
    return sv


def rabier_nu(matrix: Matrix) -> float:
    """Smallest singular value: the distance to the non-surjective maps."""
    return float(singular_values(matrix)[-1])


def operator_norm(matrix: Matrix) -> float:
    return float(singular_values(matrix)[0])


# -- Minor ratios ------------------------------------------------------------


def _pminor_sums(rows: List[List[Fraction]]) -> Tuple[Fraction, Fraction]:
    """(sum of squared p-minors, sum of squared deleted-row (p-1)-minors)."""
    p = len(rows)
    n = len(rows[0])
    num = Fraction(0)
    for cols in combinations(range(n), p):
        sub = [[row[c] for c in cols] for row in rows]
        d = _fraction_det(sub)
        num += d * d
    if p == 1:
        return num, Fraction(1)
    den = Fraction(0)
    for cols in combinations(range(n), p - 1):
        for j in range(p):
            sub = [[rows[r][c] for c in cols] for r in range(p) if r != j]
            d = _fraction_det(sub)
            den += d * d
    return num, den


def eta_squared(matrix: Matrix) -> Fraction:
    """Exact square of the minor-ratio measure, with the 0/0 = 0 convention."""
    rows = _lift(matrix)
    if len(rows[0]) < len(rows):
        raise ValueError("eta needs at least as many columns as rows")
    num, den = _pminor_sums(rows)
    if den == 0:
        return Fraction(0)
    return num / den


def eta(matrix: Matrix) -> float:
    return math.sqrt(float(eta_squared(matrix)))


def eta_tilde(matrix: Matrix) -> float:
    """max_I |M_I| / h_I where h_I is the largest deleted-row minor inside I."""
    rows = _lift(matrix)
    p = len(rows)
    n = len(rows[0])
    if n < p:
        raise ValueError("eta_tilde needs at least as many columns as rows")
    best = Fraction(0)
    for cols in combinations(range(n), p):
        sub = [[row[c] for c in cols] for row in rows]
        m_i = abs(_fraction_det(sub))
        if p == 1:
            h_i = Fraction(1)
        else:
            h_i = Fraction(0)
            for drop_col in range(p):
                jcols = [c for k, c in enumerate(cols) if k != drop_col]
                for j in range(p):
                    s = [[rows[r][c] for c in jcols] for r in range(p) if r != j]
                    h_i = max(h_i, abs(_fraction_det(s)))
        if h_i == 0:
            continue  # 0/0 convention: a fully degenerate block contributes 0
        ratio = m_i / h_i
        if ratio > best:
            best = ratio
    return float(best)


@dataclass(frozen=True)
class MeasureReport:
    """All measures of df at one point, with the dimensions for context."""

    p: int
    n: int
    kappa: float
    kappa_squared: Fraction
    nu: float
    eta: float
    eta_tilde: float

    def sandwich_violations(self, rel_tol: float = 1e-9) -> List[str]:
        out = []
        slack = 1.0 + rel_tol
        # near-singular matrices leave roundoff of order eps * scale in the
        # spectral quantities while kappa stays exactly zero, so the slack
        # needs an absolute part tied to the magnitude of the measures
        floor = rel_tol * (1.0 + self.kappa + self.nu + self.eta)
        root_p = math.sqrt(self.p)
        if self.nu > self.kappa * slack + floor:
            out.append("nu <= kappa")
        if self.kappa > root_p * self.nu * slack + floor:
            out.append("kappa <= sqrt(p) nu")
        if self.eta > self.kappa * slack + floor:
            out.append("eta <= kappa")
        if self.kappa > root_p * self.eta * slack + floor:
            out.append("kappa <= sqrt(p) eta")
        return out


def jacobian_at(f: Union[Polynomial, PolyMap], point: Sequence[Scalar]) -> List[List[Fraction]]:
    fm = as_poly_map(f)
    return [[entry.eval(point) for entry in row] for row in jacobian(fm)]


def measure_report(f: Union[Polynomial, PolyMap], point: Sequence[Scalar]) -> MeasureReport:
    fm = as_poly_map(f)
    mat = jacobian_at(fm, point)
    k2 = kuo_kappa_squared(mat)
    return MeasureReport(
        p=fm.p,
        n=fm.nvars,
        kappa=math.sqrt(float(k2)),
        kappa_squared=k2,
        nu=rabier_nu(mat),
        eta=eta(mat),
        eta_tilde=eta_tilde(mat),
    )


# -- Kuo and Thom quantities --------------------------------------------------


def _radius_row(nvars: int) -> Tuple[Polynomial, ...]:
    """Gradient row of rho(x) = ||x||^2, that is (2 x_1, ..., 2 x_n)."""
    return tuple(2 * Polynomial.variable(nvars, i) for i in range(nvars))


def kuo_quantity_polynomial(f: Union[Polynomial, PolyMap], m: int) -> Polynomial:
    """K_m as a polynomial, for even m.

    K_m(x) = ||x||^m * sum_I |det d_I f(x)|^m + ||f(x)||^m, and even powers
    make every absolute value and norm polynomial.
    """
    if m < 2 or m % 2:
        raise ValueError("the polynomial form of K_m needs even m >= 2")
    fm = as_poly_map(f)
    n = fm.nvars
    jac = jacobian(fm)
    radius_sq = Polynomial(n, {tuple(2 if j == i else 0 for j in range(n)): 1 for i in range(n)})
    minor_sum = Polynomial.zero(n)
    for (_, _), det in minors(jac, fm.p).items():
        minor_sum = minor_sum + det ** m
    f_sq = Polynomial.zero(n)
    for comp in fm.components:
        f_sq = f_sq + comp * comp
    return radius_sq ** (m // 2) * minor_sum + f_sq ** (m // 2)


def thom_quantity_polynomial(f: Union[Polynomial, PolyMap], m: int) -> Polynomial:
    """T_m as a polynomial, for even m: minors of (f, ||x||^2) plus ||f||^m."""
    if m < 2 or m % 2:
        raise ValueError("the polynomial form of T_m needs even m >= 2")
    fm = as_poly_map(f)
    n = fm.nvars
    rows = list(jacobian(fm)) + [_radius_row(n)]
    minor_sum = Polynomial.zero(n)
    for (_, _), det in minors(rows, fm.p + 1).items():
        minor_sum = minor_sum + det ** m
    f_sq = Polynomial.zero(n)
    for comp in fm.components:
        f_sq = f_sq + comp * comp
    return minor_sum + f_sq ** (m // 2)


def _norm_pow(v_sq: Fraction, m: int) -> Union[Fraction, float]:
    if m % 2 == 0:
        return v_sq ** (m // 2)
    return float(v_sq) ** (m / 2.0)


def kuo_quantity(
    f: Union[Polynomial, PolyMap], point: Sequence[Scalar], m: int
) -> Union[Fraction, float]:
    """K_m(f, x); exact rational for even m and rational points."""
    if m < 1:
        raise ValueError("m must be positive")
    fm = as_poly_map(f)
    xs = [Fraction(v) for v in point]
    x_sq = sum((v * v for v in xs), Fraction(0))
    jac = jacobian_at(fm, xs)
    minor_pow: Union[Fraction, float] = Fraction(0) if m % 2 == 0 else 0.0
    for cols in combinations(range(fm.nvars), fm.p):
        sub = [[row[c] for c in cols] for row in jac]
        d = _fraction_det(sub)
        minor_pow += d**m if m % 2 == 0 else abs(float(d)) ** m
    values = fm.eval(xs)
    f_sq = sum((v * v for v in values), Fraction(0))
    return _norm_pow(x_sq, m) * minor_pow + _norm_pow(f_sq, m)


def thom_quantity(
    f: Union[Polynomial, PolyMap], point: Sequence[Scalar], m: int
) -> Union[Fraction, float]:
    """T_m(f, x); when n = p there are no (p+1)-minors and T_m = ||f||^m."""
    if m < 1:
        raise ValueError("m must be positive")
    fm = as_poly_map(f)
    xs = [Fraction(v) for v in point]
    jac = jacobian_at(fm, xs)
    jac.append([2 * v for v in xs])
    minor_pow: Union[Fraction, float] = Fraction(0) if m % 2 == 0 else 0.0
    for cols in combinations(range(fm.nvars), fm.p + 1):
        sub = [[row[c] for c in cols] for row in jac]
        d = _fraction_det(sub)
        minor_pow += d**m if m % 2 == 0 else abs(float(d)) ** m
    values = fm.eval(xs)
    f_sq = sum((v * v for v in values), Fraction(0))
    return minor_pow + _norm_pow(f_sq, m)


# -- Ratio scan ---------------------------------------------------------------


@dataclass(frozen=True)
class ShellRatio:
    eps: float
    min_ratio: Fraction
    max_ratio: Fraction
    argmin: Tuple[float, ...]
    argmax: Tuple[float, ...]
    skipped: int


@dataclass(frozen=True)
class RatioScanResult:
    m: int
    seed: int
    shells: Tuple[ShellRatio, ...]

    def global_min(self) -> Fraction:
        return min(s.min_ratio for s in self.shells)

    def global_max(self) -> Fraction:
        return max(s.max_ratio for s in self.shells)


def km_tm_ratio_scan(
    f: Union[Polynomial, PolyMap],
    m: int,
    shells: Sequence[float],
    samples_per_shell: int,
    seed: int,
    sigma: Optional[SigmaSet] = None,
    box_radius: float = 0.5,
) -> RatioScanResult:
    """Exact K_m / T_m over sampled shells (even m; floats are lifted exactly).

    Samples where T_m vanishes carry no ratio and are counted as skipped.
    """
    if m % 2:
        raise ValueError("the exact ratio scan needs even m")
    fm = as_poly_map(f)
    sig = sigma if sigma is not None else SigmaSet.origin(fm.nvars)
    rng = np.random.default_rng(seed)
    out = []
    for eps in shells:
        pts = sample_shell(sig, float(eps), samples_per_shell, rng, box_radius)
        lo = hi = None
        arg_lo = arg_hi = None
        skipped = 0
        for row in pts:
            xs = [Fraction(float(v)) for v in row]
            t = thom_quantity(fm, xs, m)
            if t == 0:
                skipped += 1
                continue
            ratio = kuo_quantity(fm, xs, m) / t
            if lo is None or ratio < lo:
                lo, arg_lo = ratio, tuple(float(v) for v in row)
            if hi is None or ratio > hi:
                hi, arg_hi = ratio, tuple(float(v) for v in row)
        if lo is None:
            raise ValueError(f"every sample on shell eps={eps} had T_m = 0")
        out.append(ShellRatio(float(eps), lo, hi, arg_lo, arg_hi, skipped))
    return RatioScanResult(m=m, seed=seed, shells=tuple(out))
