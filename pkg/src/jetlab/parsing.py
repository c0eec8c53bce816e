"""Text and JSON forms for polynomials, maps, sigma sets, and arcs.

Text polynomials are sums of monomials `c * x1^a1 * x2^a2` with rational
coefficients written `p/q`; variables are `x1..xn`, or `x, y, z` for up to
three variables.  Emission is canonical (terms in descending lexicographic
exponent order), and `parse(emit(value)) == value` for every form here.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .poly import Arc, PolyMap, Polynomial
from .sigma import SigmaSet

_XYZ = {"x": 0, "y": 1, "z": 2}


class ParseError(ValueError):
    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column})")
        self.column = column


_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[a-zA-Z]\w*)|(?P<op>[-+*/^])|(?P<other>\S))"
)


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        col = m.start(m.lastgroup) + 1
        if m.lastgroup == "other":
            raise ParseError(f"unexpected character {m.group('other')!r}", col)
        tokens.append((m.lastgroup, m.group(m.lastgroup), col))
        pos = m.end()
    return tokens


def _variable_index(name: str, column: int) -> int:
    if name in _XYZ:
        return _XYZ[name]
    m = re.fullmatch(r"x(\d+)", name)
    if m:
        idx = int(m.group(1))
        if idx < 1:
            raise ParseError(f"variable index must be positive in {name!r}", column)
        return idx - 1
    raise ParseError(f"unknown variable {name!r}", column)


class _PolyParser:
    """Recursive-descent parser over the token list, tracking columns."""

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.end_col = len(text) + 1

    def peek(self) -> Optional[Tuple[str, str, int]]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> Tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.end_col)
        self.i += 1
        return tok

    def parse(self) -> Tuple[Dict[Tuple[int, ...], Fraction], int]:
        """Returns raw terms keyed by variable-index exponent dicts and max index."""
        terms: List[Tuple[Dict[int, int], Fraction]] = []
        max_index = -1
        sign = 1
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        while True:
            exps, coeff, hi = self._term()
            terms.append((exps, sign * coeff))
            max_index = max(max_index, hi)
            tok = self.peek()
            if tok is None:
                break
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                sign = -1 if tok[1] == "-" else 1
            else:
                raise ParseError(f"expected '+' or '-', found {tok[1]!r}", tok[2])
        raw: Dict[Tuple[int, ...], Fraction] = {}
        nv = max_index + 1
        for exps, coeff in terms:
            key = tuple(exps.get(i, 0) for i in range(nv))
            raw[key] = raw.get(key, Fraction(0)) + coeff
        return raw, nv

    def _term(self) -> Tuple[Dict[int, int], Fraction, int]:
        coeff = Fraction(1)
        exps: Dict[int, int] = {}
        hi = -1
        while True:
            c, e, idx = self._factor()
            coeff *= c
            if idx is not None:
                exps[idx] = exps.get(idx, 0) + e
                hi = max(hi, idx)
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] == "*":
                self.take()
                continue
            return exps, coeff, hi

    def _factor(self) -> Tuple[Fraction, int, Optional[int]]:
        kind, value, col = self.take()
        if kind == "int":
            coeff = Fraction(int(value))
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] == "/":
                self.take()
                dk, dv, dc = self.take()
                if dk != "int":
                    raise ParseError(f"expected denominator, found {dv!r}", dc)
                if int(dv) == 0:
                    raise ParseError("zero denominator", dc)
                coeff /= int(dv)
            return coeff, 0, None
        if kind == "name":
            idx = _variable_index(value, col)
            exp = 1
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] == "^":
                self.take()
                ek, ev, ec = self.take()
                if ek != "int":
                    raise ParseError(f"expected exponent, found {ev!r}", ec)
                exp = int(ev)
            return Fraction(1), exp, idx
        raise ParseError(f"expected a number or variable, found {value!r}", col)


def parse_polynomial(text: str, nvars: Optional[int] = None) -> Polynomial:
    parser = _PolyParser(text)
    raw, inferred = parser.parse()
    n = inferred if nvars is None else nvars
    if n < inferred:
        raise ParseError(f"polynomial uses {inferred} variables, nvars = {n} given", 1)
    n = max(n, 1)
    return Polynomial(n, {k + (0,) * (n - len(k)): v for k, v in raw.items()})


def parse_poly_map(text: str, nvars: Optional[int] = None) -> PolyMap:
    """Semicolon-separated component polynomials, all in the same variables."""
    parts = [p for p in text.split(";") if p.strip()]
    if not parts:
        raise ParseError("empty map", 1)
    polys = [parse_polynomial(p, nvars) for p in parts]
    n = max(p.nvars for p in polys)
    return PolyMap(tuple(p if p.nvars == n else _widen(p, n) for p in polys))


def _widen(p: Polynomial, n: int) -> Polynomial:
    return Polynomial(n, {k + (0,) * (n - len(k)): v for k, v in p.terms.items()})


def _var_name(i: int, nvars: int) -> str:
    if nvars <= 3:
        return "xyz"[i]
    return f"x{i + 1}"


def polynomial_to_text(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    pieces = []
    for exp in sorted(p.terms, reverse=True):
        coeff = p.terms[exp]
        factors = []
        for i, e in enumerate(exp):
            if e == 1:
                factors.append(_var_name(i, p.nvars))
            elif e > 1:
                factors.append(f"{_var_name(i, p.nvars)}^{e}")
        mag = abs(coeff)
        if not factors or mag != 1:
            factors.insert(0, str(mag))
        body = "*".join(factors)
        if not pieces:
            pieces.append(body if coeff > 0 else f"-{body}")
        else:
            pieces.append(f"+ {body}" if coeff > 0 else f"- {body}")
    return " ".join(pieces)


def map_to_text(m: PolyMap) -> str:
    return "; ".join(polynomial_to_text(c) for c in m.components)


# -- sigma text ------------------------------------------------------------


def parse_sigma(text: str, nvars: Optional[int] = None) -> SigmaSet:
    """Pieces like `{x1=0, x2=0}` joined by `|`; `origin` needs nvars."""
    stripped = text.strip()
    if stripped == "origin":
        if nvars is None:
            raise ParseError("'origin' needs an explicit variable count", 1)
        return SigmaSet.origin(nvars)
    pieces: List[List[int]] = []
    hi = -1
    pos = 0
    for chunk in stripped.split("|"):
        chunk_start = pos
        pos += len(chunk) + 1
        body = chunk.strip()
        col = chunk_start + 1
        if not (body.startswith("{") and body.endswith("}")):
            raise ParseError("each piece must be wrapped in braces", col)
        piece: List[int] = []
        for eq in body[1:-1].split(","):
            m = re.fullmatch(r"\s*([a-zA-Z]\w*)\s*=\s*0\s*", eq)
            if m is None:
                raise ParseError(f"expected 'var = 0', found {eq.strip()!r}", col)
            idx = _variable_index(m.group(1), col)
            piece.append(idx)
            hi = max(hi, idx)
        pieces.append(piece)
    n = (hi + 1) if nvars is None else nvars
    if n < hi + 1:
        raise ParseError(f"sigma uses {hi + 1} variables, nvars = {n} given", 1)
    return SigmaSet(n, pieces)


def sigma_to_text(s: SigmaSet) -> str:
    return "|".join(
        "{" + ", ".join(f"{_var_name(i, s.nvars)}=0" for i in piece) + "}"
        for piece in s.piece_lists()
    )


# -- JSON dict forms --------------------------------------------------------


def poly_to_dict(p: Polynomial) -> Dict:
    return {
        "nvars": p.nvars,
        "terms": [
            {"exp": list(exp), "num": p.terms[exp].numerator, "den": p.terms[exp].denominator}
            for exp in sorted(p.terms, reverse=True)
        ],
    }


def poly_from_dict(data: Dict) -> Polynomial:
    try:
        n = int(data["nvars"])
        raw_terms = data["terms"]
    except KeyError as exc:
        raise ValueError(f"polynomial dict is missing key {exc}") from exc
    terms = {}
    for t in raw_terms:
        try:
            exp = tuple(int(e) for e in t["exp"])
            num = int(t["num"])
        except KeyError as exc:
            raise ValueError(f"polynomial term is missing key {exc}") from exc
        if len(exp) != n:
            raise ValueError("exponent arity mismatch")
        terms[exp] = Fraction(num, int(t.get("den", 1)))
    return Polynomial(n, terms)


def map_to_dict(m: PolyMap) -> Dict:
    return {
        "nvars": m.nvars,
        "components": [poly_to_dict(c)["terms"] for c in m.components],
    }


def map_from_dict(data: Dict) -> PolyMap:
    try:
        n = int(data["nvars"])
        components = data["components"]
    except KeyError as exc:
        raise ValueError(f"map dict is missing key {exc}") from exc
    comps = [poly_from_dict({"nvars": n, "terms": terms}) for terms in components]
    return PolyMap(tuple(comps))


def sigma_to_dict(s: SigmaSet) -> Dict:
    return {
        "nvars": s.nvars,
        "pieces": [[i + 1 for i in piece] for piece in s.piece_lists()],
    }


def sigma_from_dict(data: Dict) -> SigmaSet:
    try:
        n = int(data["nvars"])
        pieces = data["pieces"]
    except KeyError as exc:
        raise ValueError(f"sigma dict is missing key {exc}") from exc
    return SigmaSet(n, [[int(i) - 1 for i in piece] for piece in pieces])
