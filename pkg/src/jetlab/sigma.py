"""Finite unions of coordinate subspaces and horn neighborhoods around them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from .poly import (
    INFINITE,
    Arc,
    Order,
    PolyMap,
    Polynomial,
    Scalar,
    as_poly_map,
    order_min,
)


class ShellSamplingError(RuntimeError):
    """Raised when a distance shell cannot be sampled in the requested box."""


@dataclass(frozen=True)
class SigmaSet:
    """Union of coordinate subspaces of R^n.

    Each piece is the frozenset of variable indices forced to zero on that
    subspace.  Pieces whose forced set contains another piece's forced set
    describe a subset of that other piece and are pruned, so the stored
    representation is an irredundant union.
    """

    nvars: int
    pieces: Tuple[frozenset, ...]

    def __init__(self, nvars: int, pieces: Iterable[Iterable[int]]):
        raw = [frozenset(int(i) for i in piece) for piece in pieces]
        if not raw:
            raise ValueError("sigma needs at least one piece")
        for piece in raw:
            if not piece:
                raise ValueError("a piece must force at least one coordinate")
            if any(not 0 <= i < nvars for i in piece):
                raise ValueError("forced index out of range")
        # Drop strict supersets and duplicates, keep a deterministic order.
        pruned = []
        for p in raw:
            if any(q < p for q in raw):
                continue
            if p not in pruned:
                pruned.append(p)
        pruned.sort(key=lambda s: (len(s), sorted(s)))
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "pieces", tuple(pruned))

    @staticmethod
    def origin(nvars: int) -> "SigmaSet":
        return SigmaSet(nvars, [tuple(range(nvars))])

    def piece_lists(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(sorted(p)) for p in self.pieces)

    # -- distances ----------------------------------------------------------

    def distance_squared_exact(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError("point arity mismatch")
        xs = [Fraction(v) for v in point]
        best = None
        for piece in self.pieces:
            d2 = sum((xs[i] * xs[i] for i in piece), Fraction(0))
            if best is None or d2 < best:
                best = d2
        return best

    def distance(self, point: Sequence[float]) -> float:
        best = None
        for piece in self.pieces:
            d2 = sum(float(point[i]) ** 2 for i in piece)
            if best is None or d2 < best:
                best = d2
        return best**0.5

    def distances(self, points: np.ndarray) -> np.ndarray:
        """Vectorized distance of an (N, n) array of points."""
        pts = np.asarray(points, dtype=float)
        per_piece = [
            np.sqrt(np.sum(pts[:, sorted(piece)] ** 2, axis=1)) for piece in self.pieces
        ]
        return np.min(np.stack(per_piece, axis=0), axis=0)

    def contains(self, point: Sequence[float]) -> bool:
        """Exact membership: some piece has all forced coordinates equal to zero."""
        return any(all(point[i] == 0 for i in piece) for piece in self.pieces)

    # -- arc order ----------------------------------------------------------

    def distance_order_along_arc(self, arc: Arc) -> Order:
        """Vanishing order of t -> d(lambda(t), sigma).

        Per piece the distance is the norm of the forced block, whose order
        is the smallest component order; the union takes the pointwise
        minimum of the piece distances, and for t -> 0 the smallest branch
        is the one vanishing fastest, so the union's order is the maximum
        over pieces.  It is infinite exactly when the arc lies inside some
        piece.
        """
        if arc.nvars != self.nvars:
            raise ValueError("arc arity mismatch")
        piece_orders = [
            order_min(*(arc.component_order(i) for i in sorted(piece)))
            for piece in self.pieces
        ]
        return max(piece_orders)


def distance_order_along_arc(arc: Arc, sigma: SigmaSet) -> Order:
    return sigma.distance_order_along_arc(arc)


@dataclass(frozen=True)
class HornSpec:
    """Horn neighborhood {x : ||f(x)|| <= width * d(x, sigma)^degree}."""

    f: PolyMap
    sigma: SigmaSet
    degree: int
    width: Fraction

    def __init__(
        self,
        f: Union[Polynomial, PolyMap],
        sigma: SigmaSet,
        degree: int,
        width: Scalar = 1,
    ):
        fm = as_poly_map(f)
        if fm.nvars != sigma.nvars:
            raise ValueError("map and sigma arity mismatch")
        if degree < 1:
            raise ValueError("horn degree must be >= 1")
        w = Fraction(width)
        if w <= 0:
            raise ValueError("horn width must be positive")
        object.__setattr__(self, "f", fm)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "width", w)


def horn_contains(point: Sequence[Scalar], horn: HornSpec) -> bool:
    """Exact horn membership test at a rational (or float, exactly lifted) point."""
    xs = [Fraction(v) for v in point]
    values = horn.f.eval(xs)
    lhs_sq = sum((v * v for v in values), Fraction(0))
    d_sq = horn.sigma.distance_squared_exact(xs)
    rhs_sq = horn.width * horn.width * d_sq**horn.degree
    return lhs_sq <= rhs_sq


# ---------------------------------------------------------------------------
# Shell sampling
# ---------------------------------------------------------------------------


def _embed(nvars: int, piece: Sequence[int], block: np.ndarray, free_vals) -> np.ndarray:
    x = np.zeros(nvars)
    for idx, val in zip(piece, block):
        x[idx] = val
    free = [i for i in range(nvars) if i not in piece]
    for idx, val in zip(free, free_vals):
        x[idx] = val
    return x

def shell_grid_points(sigma: SigmaSet, eps: float) -> list:
    """Deterministic shell points: per piece, axis and diagonal directions."""
    pts = []
    for piece in sigma.piece_lists():
        k = len(piece)
        for i in piece:
            for s in (1.0, -1.0):
                x = np.zeros(sigma.nvars)
                x[i] = s * eps
                pts.append(x)
        diag = eps / np.sqrt(k)
        for s in (1.0, -1.0):
            x = np.zeros(sigma.nvars)
            for i in piece:
                x[i] = s * diag
            pts.append(x)
    return pts


def sample_shell(
    sigma: SigmaSet,
    eps: float,
    count: int,
    rng: Union[int, np.random.Generator],
    box_radius: float = 0.5,
) -> np.ndarray:
    """Sample ``count`` points with d(x, sigma) equal to eps.

    Points are drawn piece by piece: the forced block lies on the radius-eps
    sphere of the piece, free coordinates are uniform in the sampling box.
    Draws landing closer than eps to a different piece are rejected so the
    shell property holds for the union.  The first points are a fixed grid
    of axis and diagonal directions; the remainder is pseudorandom from the
    supplied generator or seed.
    """
    if eps <= 0:
        raise ValueError("shell radius must be positive")
    if count < 1:
        raise ValueError("need a positive sample count")
    if len(sigma.pieces) > 1 and box_radius < eps:
        raise ShellSamplingError(
            f"free coordinates bounded by {box_radius} cannot clear other pieces "
            f"at shell radius {eps}"
        )
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    tol = 1.0 - 1e-12
    accepted = []
    for x in shell_grid_points(sigma, eps):
        if sigma.distance(x) >= eps * tol:
            accepted.append(x)
            if len(accepted) == count:
                break
    pieces = sigma.piece_lists()
    attempts = 0
    max_attempts = 200 * count + 100
    while len(accepted) < count:
        if attempts >= max_attempts:
            raise ShellSamplingError(
                f"could not place {count} points on the eps={eps} shell "
                f"(box_radius={box_radius}); geometry may be infeasible"
            )
        attempts += 1
        piece = pieces[attempts % len(pieces)]
        k = len(piece)
        block = gen.normal(size=k)
        norm = float(np.linalg.norm(block))
        if norm == 0.0:
            continue
        block = block * (eps / norm)
        nfree = sigma.nvars - k
        free_vals = gen.uniform(-box_radius, box_radius, size=nfree)
        x = _embed(sigma.nvars, piece, block, free_vals)
        if sigma.distance(x) >= eps * tol:
            accepted.append(x)
    return np.asarray(accepted[:count])
