"""Vectorized float evaluation of polynomials, Jacobians and kappa."""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from .poly import PolyMap, Polynomial, as_poly_map, jacobian


class PolyEvaluator:
    """Evaluate one polynomial at many points at float precision."""

    def __init__(self, poly: Polynomial):
        self.nvars = poly.nvars
        items = sorted(poly.terms.items())
        self.coeffs = np.array([float(c) for _, c in items], dtype=float)
        self.exps = (
            np.array([list(e) for e, _ in items], dtype=np.int64)
            if items
            else np.zeros((0, poly.nvars), dtype=np.int64)
        )

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.coeffs.size == 0:
            return np.zeros(pts.shape[0])
        acc = np.ones((pts.shape[0], self.coeffs.size))
        for i in range(self.nvars):
            e = self.exps[:, i]
            if np.any(e):
                acc *= pts[:, i][:, None] ** e[None, :]
        return acc @ self.coeffs


class MapEvaluator:
    """Evaluate a polynomial map and its euclidean norm at many points."""

    def __init__(self, f: Union[Polynomial, PolyMap]):
        fm = as_poly_map(f)
        self.nvars = fm.nvars
        self.p = fm.p
        self.components = [PolyEvaluator(c) for c in fm.components]

    def values(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.stack([comp(pts) for comp in self.components], axis=1)

    def norms(self, pts: np.ndarray) -> np.ndarray:
        return np.linalg.norm(self.values(pts), axis=1)


def kappa_float(matrix: np.ndarray) -> float:
    """Kuo distance of the rows of one float matrix.

    The distance from a row to the span of the others is the least-squares
    residual norm, which is well defined even when the other rows are
    dependent.
    """
    m = np.asarray(matrix, dtype=float)
    p = m.shape[0]
    if p == 1:
        return float(np.linalg.norm(m[0]))
    best = np.inf
    for i in range(p):
        v = m[i]
        others = np.delete(m, i, axis=0)
        # rescaling rows leaves the span alone but keeps the solve away
        # from subnormals, where lstsq can emit non-finite coefficients
        scale = float(np.max(np.abs(others)))
        if scale == 0.0 or not np.isfinite(scale):
            dist = float(np.linalg.norm(v))
        else:
            basis = (others / scale).T
            coef, *_ = np.linalg.lstsq(basis, v, rcond=None)
            dist = float(np.linalg.norm(v - basis @ coef))
        if dist < best:
            best = dist
    return best


class JacobianEvaluator:
    """Evaluate df (and kappa of it) at many points."""

    def __init__(self, f: Union[Polynomial, PolyMap]):
        fm = as_poly_map(f)
        self.nvars = fm.nvars
        self.p = fm.p
        self.rows = [[PolyEvaluator(entry) for entry in row] for row in jacobian(fm)]

    def matrices(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.empty((pts.shape[0], self.p, self.nvars))
        for j, row in enumerate(self.rows):
            for i, entry in enumerate(row):
                out[:, j, i] = entry(pts)
        return out

    def kappa(self, pts: np.ndarray) -> np.ndarray:
        mats = self.matrices(pts)
        if self.p == 1:
            return np.linalg.norm(mats[:, 0, :], axis=1)
        return np.array([kappa_float(mat) for mat in mats])

    def matrix_at(self, point: Sequence[float]) -> np.ndarray:
        return self.matrices(np.asarray(point, dtype=float)[None, :])[0]
