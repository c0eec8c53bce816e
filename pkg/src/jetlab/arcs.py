"""Order analysis of sufficiency conditions along polynomial test arcs.

Along an arc lambda(t) -> 0 every quantity entering the checked inequalities
has a well defined vanishing order, and each condition reduces to an exact
comparison of integers:

    kk            kappa(df) >~ d^(r-1)    violated iff ord kappa > (r-1) ord d
    ktilde        d kappa + ||f|| >~ d^r  violated iff min(ord d + ord kappa,
                                          ord f) > r ord d
    kk-delta      kappa >~ d^(r-delta) for some delta > 0
                                          violated iff ord kappa >= r ord d
    ktilde-delta  d kappa + ||f|| >~ d^(r+1-delta) for some delta > 0
                                          violated iff the combined order
                                          reaches (r+1) ord d
    kz            (d kappa + ||f||) / d^(r+1) -> infinity
                                          divergence fails on the same
                                          boundary as ktilde-delta

The order of kappa along an arc is computed through the minor-ratio measure
eta, which bounds kappa above and below up to constant factors and whose
order is (least order among p-minor compositions) minus (least order among
deleted-row (p-1)-minor compositions), with 0/0 reading as order infinity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .poly import (
    INFINITE,
    UNKNOWN,
    Arc,
    Order,
    PolyMap,
    Polynomial,
    as_poly_map,
    compose_arc,
    default_truncation,
    jacobian,
    minors,
    order_add,
    order_ge,
    order_gt,
    order_is_known,
    order_min,
    order_scale,
)
from .sigma import SigmaSet
from .verdicts import FAILS, HOLDS, INCONCLUSIVE, Verdict

ARC_CONDITIONS = ("kk", "ktilde", "kk-delta", "ktilde-delta", "kz")


class ArcScanError(RuntimeError):
    pass


def _min_order(orders: Iterable[Order]) -> Order:
    """Least order in a family, sound in the presence of unknowns.

    A known finite order is at most the truncation degree while an unknown
    order lies strictly beyond it, so any known finite entry wins the
    minimum outright; the result is unknown only when nothing finite is
    known and some entry is unknown.
    """
    best = INFINITE
    saw_unknown = False
    for o in orders:
        if not order_is_known(o):
            saw_unknown = True
        elif o < best:
            best = o
    if best == INFINITE and saw_unknown:
        return UNKNOWN
    return best


def norm_order(series_list: Sequence) -> Order:
    """Order of the euclidean norm of a tuple of series.

    The squared norm is a sum of squared series whose leading coefficients
    are positive and cannot cancel, so its order is exactly twice the least
    component order; halving gives the norm's order directly.
    """
    return _min_order(s.order() for s in series_list)


class _ArcAnalyzer:
    """Composes one map's minors along many arcs, precomputing the symbols once."""

    def __init__(self, f: Union[Polynomial, PolyMap], sigma: SigmaSet, r: int):
        self.fm = as_poly_map(f)
        if sigma.nvars != self.fm.nvars:
            raise ValueError("map and sigma arity mismatch")
        if r < 1:
            raise ValueError("jet order r must be at least 1")
        self.sigma = sigma
        self.r = r
        jac = jacobian(self.fm)
        p = self.fm.p
        self.p_minors = [det for _, det in sorted(minors(jac, p).items())]
        if p == 1:
            self.sub_minors: List[Polynomial] = []
        else:
            self.sub_minors = [det for _, det in sorted(minors(jac, p - 1).items())]

    def truncation_for(self, arc: Arc) -> int:
        return default_truncation(self.r, self.fm.total_degree(), arc.max_exponent())

    def kappa_order(self, arc: Arc, truncation: int) -> Order:
        num = _min_order(
            compose_arc(det, arc, truncation).order() for det in self.p_minors
        )
        if self.fm.p == 1:
            den: Order = 0
        else:
            den = _min_order(
                compose_arc(det, arc, truncation).order() for det in self.sub_minors
            )
        if not (order_is_known(num) and order_is_known(den)):
            return UNKNOWN
        if num == INFINITE or den == INFINITE:
            # den infinite forces num infinite (expand any p-minor along a
            # row); both infinite is the degenerate 0/0 case, read as 0.
            return INFINITE
        return num - den

    def profile(self, arc: Arc, truncation: Optional[int] = None) -> "ArcProfile":
        if truncation is None:
            truncation = self.truncation_for(arc)
        ord_d = self.sigma.distance_order_along_arc(arc)
        ord_f = norm_order(
            compose_arc(c, arc, truncation) for c in self.fm.components
        )
        ord_kappa = self.kappa_order(arc, truncation)
        return ArcProfile(
            arc=arc,
            r=self.r,
            ord_d=ord_d,
            ord_f=ord_f,
            ord_kappa=ord_kappa,
            truncation=truncation,
        )


def kappa_order_along_arc(
    f: Union[Polynomial, PolyMap],
    arc: Arc,
    truncation: Optional[int] = None,
    sigma: Optional[SigmaSet] = None,
) -> Order:
    """Vanishing order of t -> kappa(df(lambda(t)))."""
    fm = as_poly_map(f)
    sig = sigma if sigma is not None else SigmaSet.origin(fm.nvars)
    analyzer = _ArcAnalyzer(fm, sig, 1)
    if truncation is None:
        truncation = default_truncation(
            fm.p + 1, fm.total_degree(), arc.max_exponent()
        )
    return analyzer.kappa_order(arc, truncation)


@dataclass(frozen=True)
class ArcProfile:
    """Exact orders along one arc, with the inequality slacks they imply."""

    arc: Arc
    r: int
    ord_d: Order
    ord_f: Order
    ord_kappa: Order
    truncation: int

    @property
    def inside_sigma(self) -> bool:
        return order_is_known(self.ord_d) and self.ord_d == INFINITE

    @property
    def combined_order(self) -> Order:
        """Order of d * kappa + ||f|| along the arc."""
        return order_min(order_add(self.ord_d, self.ord_kappa), self.ord_f)

    def bl_deficit(self) -> Order:
        """Order of d * kappa minus order of ||f|| (positive = gradient too flat)."""
        dk = order_add(self.ord_d, self.ord_kappa)
        if not (order_is_known(dk) and order_is_known(self.ord_f)):
            return UNKNOWN
        if dk == INFINITE and self.ord_f == INFINITE:
            return UNKNOWN
        if dk == INFINITE:
            return INFINITE
        if self.ord_f == INFINITE:
            return -INFINITE
        return dk - self.ord_f

    def delta_max(self, condition: str) -> Union[Fraction, float, None]:
        """Largest delta the arc leaves room for, in the delta-family conditions."""
        if self.inside_sigma or not order_is_known(self.ord_d):
            return None
        if condition == "kk-delta":
            lead = self.ord_kappa
            base = Fraction(self.r)
        elif condition in ("ktilde-delta", "kz"):
            lead = self.combined_order
            base = Fraction(self.r + 1)
        else:
            raise ValueError(f"no delta budget for condition {condition!r}")
        if not order_is_known(lead):
            return None
        if lead == INFINITE:
            return -INFINITE
        return base - Fraction(lead, self.ord_d)

    def to_dict(self) -> Dict:
        from .verdicts import _jsonable

        return {
            "arc": arc_to_dict(self.arc),
            "r": self.r,
            "ord_d": _jsonable(self.ord_d),
            "ord_f": _jsonable(self.ord_f),
            "ord_kappa": _jsonable(self.ord_kappa),
            "combined_order": _jsonable(self.combined_order),
            "truncation": self.truncation,
        }


def profile_arc(
    f: Union[Polynomial, PolyMap],
    sigma: SigmaSet,
    arc: Arc,
    r: int,
    truncation: Optional[int] = None,
) -> ArcProfile:
    fm = as_poly_map(f)
    if arc.nvars != fm.nvars:
        raise ValueError("arc arity mismatch")
    return _ArcAnalyzer(fm, sigma, r).profile(arc, truncation)


def arc_violates(condition: str, profile: ArcProfile) -> Optional[bool]:
    """Whether the arc witnesses failure of the condition; None = inconclusive.

    For "kz" the returned flag is True when divergence fails along the arc,
    which is what refutes the divergence condition.
    """
    if condition not in ARC_CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    if profile.inside_sigma:
        return False
    r, ord_d = profile.r, profile.ord_d
    if condition == "kk":
        return order_gt(profile.ord_kappa, order_scale(r - 1, ord_d))
    if condition == "ktilde":
        return order_gt(profile.combined_order, order_scale(r, ord_d))
    if condition == "kk-delta":
        return order_ge(profile.ord_kappa, order_scale(r, ord_d))
    # ktilde-delta and kz share the boundary: no positive delta survives the
    # arc exactly when the KZ ratio fails to diverge along it.
    return order_ge(profile.combined_order, order_scale(r + 1, ord_d))


# ---------------------------------------------------------------------------
# Lattice scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanConfig:
    max_exponent: int = 10
    terms_per_component: int = 1
    coeff_strategy: str = "resonance"  # "units" | "generic" | "resonance"
    seed: int = 0
    cap: int = 1_000_000
    generic_draws: int = 3

    def __post_init__(self):
        if self.max_exponent < 1:
            raise ValueError("max_exponent must be >= 1")
        if self.terms_per_component not in (1, 2):
            raise ValueError("terms_per_component must be 1 or 2")
        if self.coeff_strategy not in ("units", "generic", "resonance"):
            raise ValueError(f"unknown strategy {self.coeff_strategy!r}")


_UNIT_COEFFS = (Fraction(1), Fraction(-1), Fraction(2), Fraction(-2))


def _component_shapes(cfg: ScanConfig) -> List[Tuple[int, ...]]:
    shapes: List[Tuple[int, ...]] = [()]
    shapes += [(e,) for e in range(1, cfg.max_exponent + 1)]
    if cfg.terms_per_component == 2:
        shapes += [
            (e1, e2)
            for e1 in range(1, cfg.max_exponent)
            for e2 in range(e1 + 1, cfg.max_exponent + 1)
        ]
    return shapes


def _rational_roots(coeffs: Dict[int, Fraction]) -> List[Fraction]:
    """Nonzero rational roots of sum_k coeffs[k] * c^k, by the rational root test."""
    if not coeffs:
        return []
    shift = min(coeffs)
    reduced = {k - shift: v for k, v in coeffs.items()}
    degree = max(reduced)
    if degree == 0:
        return []
    denom = lcm(*(v.denominator for v in reduced.values()))
    ints = {k: int(v * denom) for k, v in reduced.items()}
    a0 = ints.get(0, 0)
    lead = ints[degree]
    if a0 == 0:
        # c = 0 is not an admissible coefficient; peel it off and recurse.
        return _rational_roots({k: Fraction(v) for k, v in ints.items() if v})
    if abs(a0) > 10**9 or abs(lead) > 10**9:
        return []

    def divisors(n: int) -> List[int]:
        n = abs(n)
        out = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
        return sorted(set(out + [n // d for d in out]))

    roots = []
    for num in divisors(a0):
        for den in divisors(lead):
            for sign in (1, -1):
                cand = Fraction(sign * num, den)
                value = sum(c * cand**k for k, c in ints.items())
                if value == 0 and cand not in roots:
                    roots.append(cand)
    roots.sort()
    return roots


def _resonance_extras(
    polys: Sequence[Polynomial],
    shape: Sequence[Tuple[int, ...]],
    nvars: int,
) -> List[Tuple[Fraction, ...]]:
    """Leading-coefficient cancellation solving, one unknown at a time.

    For single-term components c_i t^(e_i), each polynomial composes to
    sum_alpha a_alpha c^alpha t^(alpha . e).  When several exponents tie for
    the least t-power, solving the tied coefficient sum for one c_i over a
    unit base assignment yields the resonant coefficient vectors (the
    classical a^2 = b^m cases and friends).  Only the first term of each
    component is treated as unknown; extra terms keep unit coefficients.
    """
    active = [i for i in range(nvars) if shape[i]]
    if not active:
        return []
    lead_exp = {i: shape[i][0] for i in active}
    extras: List[Tuple[Fraction, ...]] = []
    bases = list(itertools.product((Fraction(1), Fraction(-1)), repeat=len(active)))
    for poly in polys:
        groups: Dict[int, List[Tuple[Tuple[int, ...], Fraction]]] = {}
        for exp, coeff in poly.terms.items():
            if any(exp[i] > 0 and not shape[i] for i in range(nvars)):
                continue
            w = sum(exp[i] * lead_exp[i] for i in active)
            groups.setdefault(w, []).append((exp, coeff))
        if not groups:
            continue
        tied = groups[min(groups)]
        if len(tied) < 2:
            continue
        for var in active:
            degrees = {exp[var] for exp, _ in tied}
            if len(degrees) < 2:
                continue
            for base in bases:
                base_map = dict(zip(active, base))
                uni: Dict[int, Fraction] = {}
                for exp, coeff in tied:
                    factor = coeff
                    for i in active:
                        if i != var and exp[i]:
                            factor *= base_map[i] ** exp[i]
                    uni[exp[var]] = uni.get(exp[var], Fraction(0)) + factor
                uni = {k: v for k, v in uni.items() if v}
                for root in _rational_roots(uni):
                    assignment = dict(base_map)
                    assignment[var] = root
                    vec = tuple(assignment[i] for i in active)
                    if vec not in extras:
                        extras.append(vec)
    return extras


def _first_coeff_sets(
    cfg: ScanConfig,
    shape: Sequence[Tuple[int, ...]],
    polys: Sequence[Polynomial],
    nvars: int,
    rng: np.random.Generator,
) -> List[Tuple[Fraction, ...]]:
    """Coefficient vectors for the leading term of each nonempty component."""
    active = [i for i in range(nvars) if shape[i]]
    k = len(active)
    if k == 0:
        return [()]
    if cfg.coeff_strategy == "generic":
        out = []
        for _ in range(cfg.generic_draws):
            vec = tuple(
                Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 5)))
                * (1 if rng.integers(0, 2) else -1)
                for _ in range(k)
            )
            if vec not in out:
                out.append(vec)
        return out
    units = [tuple(v) for v in itertools.product(_UNIT_COEFFS, repeat=k)]
    if cfg.coeff_strategy == "units":
        return units
    extras = _resonance_extras(polys, shape, nvars)
    return units + [v for v in extras if v not in units]


def _arcs_for_shape(
    cfg: ScanConfig,
    shape: Sequence[Tuple[int, ...]],
    polys: Sequence[Polynomial],
    nvars: int,
    rng: np.random.Generator,
) -> Iterable[Arc]:
    active = [i for i in range(nvars) if shape[i]]
    extra_slots = sum(max(0, len(shape[i]) - 1) for i in range(nvars))
    for first in _first_coeff_sets(cfg, shape, polys, nvars, rng):
        lead = dict(zip(active, first))
        if extra_slots == 0:
            tails: Iterable[Tuple[Fraction, ...]] = [()]
        elif cfg.coeff_strategy == "generic":
            tails = [
                tuple(
                    Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 5)))
                    * (1 if rng.integers(0, 2) else -1)
                    for _ in range(extra_slots)
                )
            ]
        else:
            tails = itertools.product(_UNIT_COEFFS, repeat=extra_slots)
        for tail in tails:
            it = iter(tail)
            comps = []
            for i in range(nvars):
                exps = shape[i]
                if not exps:
                    comps.append(())
                else:
                    terms = [(exps[0], lead[i])]
                    terms += [(e, next(it)) for e in exps[1:]]
                    comps.append(tuple(terms))
            yield Arc(comps)


def arc_scan(
    f: Union[Polynomial, PolyMap],
    sigma: SigmaSet,
    r: int,
    condition: str,
    config: Optional[ScanConfig] = None,
) -> Verdict:
    """Scan the arc lattice for a violation witness of one condition.

    The scan is exhaustive over the configured lattice and deterministic;
    the first witness in enumeration order (shapes and coefficients both
    enumerated lexicographically) is reported.  A clean sweep is evidence,
    not proof, and is labelled accordingly.
    """
    cfg = config or ScanConfig()
    fm = as_poly_map(f)
    if condition not in ARC_CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    rng = np.random.default_rng(cfg.seed)
    analyzer = _ArcAnalyzer(fm, sigma, r)
    solve_polys = list(fm.components) + list(analyzer.p_minors)
    shapes = _component_shapes(cfg)
    checked = 0
    inconclusive = 0
    worst_delta: Union[Fraction, float, None] = None
    boundary: Optional[Tuple[Arc, ArcProfile]] = None
    for shape in itertools.product(shapes, repeat=fm.nvars):
        if all(len(s) == 0 for s in shape):
            continue
        zero_components = {i for i, s in enumerate(shape) if not s}
        if any(piece <= zero_components for piece in sigma.pieces):
            continue  # the whole shape family lies inside sigma
        for arc in _arcs_for_shape(cfg, shape, solve_polys, fm.nvars, rng):
            checked += 1
            if checked > cfg.cap:
                raise ArcScanError(
                    f"arc lattice exceeds the configured cap ({cfg.cap}); "
                    "restrict max_exponent or terms_per_component"
                )
            profile = analyzer.profile(arc)
            flag = arc_violates(condition, profile)
            if flag is None:
                inconclusive += 1
                continue
            if flag:
                if condition == "ktilde-delta" and profile.delta_max(condition) == 0:
                    # A witness exactly on the threshold only rules out the
                    # boundary of the delta family; keep hunting for a strict
                    # one and fall back to this arc if none turns up.
                    if boundary is None:
                        boundary = (arc, profile)
                    continue
                return Verdict(
                    condition=condition,
                    r=r,
                    mode="arc",
                    status=FAILS,
                    witness=arc,
                    witness_profile=profile,
                    delta_estimate=_frac_or_none(profile, condition),
                    diagnostics={
                        "arcs_checked": checked,
                        "seed": cfg.seed,
                        "max_exponent": cfg.max_exponent,
                        "terms_per_component": cfg.terms_per_component,
                        "coeff_strategy": cfg.coeff_strategy,
                    },
                )
            if condition in ("kk-delta", "ktilde-delta", "kz"):
                d = profile.delta_max(condition)
                if d is not None and (worst_delta is None or d < worst_delta):
                    worst_delta = d
    if boundary is not None:
        arc, profile = boundary
        return Verdict(
            condition=condition,
            r=r,
            mode="arc",
            status=FAILS,
            witness=arc,
            witness_profile=profile,
            delta_estimate=_frac_or_none(profile, condition),
            diagnostics={
                "arcs_checked": checked,
                "seed": cfg.seed,
                "max_exponent": cfg.max_exponent,
                "terms_per_component": cfg.terms_per_component,
                "coeff_strategy": cfg.coeff_strategy,
                "boundary_only": True,
            },
        )
    status = INCONCLUSIVE if inconclusive else HOLDS
    diag = {
        "arcs_checked": checked,
        "inconclusive_arcs": inconclusive,
        "seed": cfg.seed,
        "max_exponent": cfg.max_exponent,
        "terms_per_component": cfg.terms_per_component,
        "coeff_strategy": cfg.coeff_strategy,
    }
    delta = None
    if condition in ("kk-delta", "ktilde-delta", "kz") and isinstance(
        worst_delta, Fraction
    ):
        delta = worst_delta
        diag["delta_max_over_lattice"] = float(worst_delta)
    return Verdict(
        condition=condition,
        r=r,
        mode="arc",
        status=status,
        delta_estimate=delta,
        diagnostics=diag,
    )


def _frac_or_none(profile: ArcProfile, condition: str):
    if condition in ("kk-delta", "ktilde-delta", "kz"):
        d = profile.delta_max(condition)
        return d if isinstance(d, Fraction) else None
    return None


def arc_to_dict(arc: Arc) -> Dict:
    return arc.to_dict()


def arc_from_dict(data: Dict) -> Arc:
    comps = [
        [(term["exp"], Fraction(term["num"], term["den"])) for term in comp]
        for comp in data["components"]
    ]
    if len(comps) != data.get("nvars", len(comps)):
        raise ValueError("arc component count disagrees with nvars")
    return Arc(comps)
