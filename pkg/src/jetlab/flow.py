"""Kuo vector field construction and integration for F(x, t) = f + t(g - f).

The field moves points so that F is a first integral: level sets of f at
t = 0 are carried onto level sets of g at t = 1 while every point of sigma
stays bitwise fixed.  The perturbation h = g - f must vanish to order r + 1
on sigma (the monomial jet criterion); that makes h, and with it the spatial
velocity, exactly zero on sigma even in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .numeric import JacobianEvaluator, MapEvaluator
from .poly import PolyMap, Polynomial, as_poly_map, jet_vanishes_on_sigma
from .sigma import SigmaSet


class DegenerateGradientError(RuntimeError):
    """All of N_j collapsed below the floor while h_j is nonzero there."""


@dataclass(frozen=True)
class FlowConfig:
    max_step: float = 1e-2
    tol: float = 1e-8
    distance_floor: float = 1e-12
    degeneracy_floor: float = 1e-10
    region_radius: float = 2.0
    max_steps: int = 200_000

    def __post_init__(self):
        if self.max_step <= 0 or self.tol <= 0:
            raise ValueError("max_step and tol must be positive")


class FlowProblem:
    """A validated pair of realisations f, g of one jet relative to sigma."""

    def __init__(
        self,
        f: Union[Polynomial, PolyMap],
        g: Union[Polynomial, PolyMap],
        sigma: SigmaSet,
        r: int,
        config: Optional[FlowConfig] = None,
    ):
        self.f = as_poly_map(f)
        self.g = as_poly_map(g)
        self.sigma = sigma
        self.r = int(r)
        self.config = config or FlowConfig()
        if self.f.nvars != sigma.nvars or self.g.nvars != sigma.nvars:
            raise ValueError("variable count mismatch between maps and sigma")
        if self.f.p != self.g.p:
            raise ValueError("f and g must have the same number of components")
        if self.r < 1:
            raise ValueError("r must be at least 1")
        h = PolyMap(tuple(gc - fc for gc, fc in zip(self.g.components, self.f.components)))
        if not jet_vanishes_on_sigma(h, sigma, self.r):
            raise ValueError(
                "g - f does not vanish to order r+1 on sigma; "
                "f and g are not realisations of one relative r-jet"
            )
        self.h = h
        self._h_eval = MapEvaluator(h)
        self._f_eval = MapEvaluator(self.f)
        self._jac_f = JacobianEvaluator(self.f)
        self._jac_h = JacobianEvaluator(h)

    # -- field ------------------------------------------------------------

    def h_at(self, x: np.ndarray) -> np.ndarray:
        return self._h_eval.values(np.asarray(x, dtype=float)[None, :])[0]

    def family_at(self, x: np.ndarray, t: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self._f_eval.values(x[None, :])[0] + t * self.h_at(x)

    def kuo_field(self, x: np.ndarray, t: float) -> np.ndarray:
        """Spatial velocity v(x, t); exactly zero wherever h vanishes."""
        x = np.asarray(x, dtype=float)
        hvals = self.h_at(x)
        v = np.zeros(self.sigma.nvars)
        if not np.any(hvals):
            return v
        jac = self._jac_f.matrix_at(x) + t * self._jac_h.matrix_at(x)
        d = self.sigma.distance(x)
        floor = self.config.degeneracy_floor * d ** (self.r - 1)
        p = jac.shape[0]
        for j in range(p):
            row = jac[j]
            if p > 1:
                others = np.delete(jac, j, axis=0)
                coef, *_ = np.linalg.lstsq(others.T, row, rcond=None)
                nj = row - others.T @ coef
            else:
                nj = row
            norm2 = float(nj @ nj)
            if norm2 <= floor * floor:
                if hvals[j] != 0.0:
                    raise DegenerateGradientError(
                        f"gradient component {j} degenerate at distance {d:.3e}"
                    )
                continue
            v -= (hvals[j] / norm2) * nj
        return v


@dataclass
class Trajectory:
    """Append-only record of one integrated curve, sampled per accepted step."""

    ts: List[float] = field(default_factory=list)
    xs: List[np.ndarray] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    distances: List[float] = field(default_factory=list)
    status: str = "ok"
    message: str = ""

    def append(self, t: float, x: np.ndarray, residual: float, dist: float) -> None:
        if self.ts and not (t != self.ts[-1]):
            raise ValueError("trajectory times must be strictly monotone")
        self.ts.append(float(t))
        self.xs.append(np.array(x, dtype=float))
        self.residuals.append(float(residual))
        self.distances.append(float(dist))

    @property
    def endpoint(self) -> np.ndarray:
        return self.xs[-1]

    @property
    def max_residual(self) -> float:
        return max(self.residuals)

    def to_dict(self) -> Dict:
        return {
            "status": self.status,
            "message": self.message,
            "samples": [
                {"t": t, "x": list(map(float, x)), "F_residual": r, "d_sigma": d}
                for t, x, r, d in zip(self.ts, self.xs, self.residuals, self.distances)
            ],
        }


def _rk4(problem: FlowProblem, x: np.ndarray, t: float, dt: float) -> np.ndarray:
    k1 = problem.kuo_field(x, t)
    k2 = problem.kuo_field(x + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = problem.kuo_field(x + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = problem.kuo_field(x + dt * k3, t + dt)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    problem: FlowProblem,
    x0: Sequence[float],
    t0: float = 0.0,
    t1: float = 1.0,
) -> Trajectory:
    """Integrate the Kuo field from (x0, t0) to t1 with RK4 step doubling.

    The step obeys three caps: the configured maximum, 0.1 * d(x, sigma) /
    ||v|| (which shrinks steps near sigma and preserves the log-distance
    envelope discretely), and the remaining time.  Local error per step is
    kept below tol * (1 + ||x||) by halving; points of sigma short-circuit
    to an exactly vertical segment.
    """
    cfg = problem.config
    x = np.array(x0, dtype=float)
    traj = Trajectory()
    f0 = problem.family_at(x, t0)

    def residual(pt: np.ndarray, t: float) -> float:
        return float(np.linalg.norm(problem.family_at(pt, t) - f0))

    if problem.sigma.contains([float(c) for c in x]):
        traj.append(t0, x, residual(x, t0), 0.0)
        traj.append(t1, x, residual(x, t1), 0.0)
        return traj

    t = t0
    direction = 1.0 if t1 >= t0 else -1.0
    traj.append(t, x, 0.0, problem.sigma.distance(x))
    for _ in range(cfg.max_steps):
        if direction * (t1 - t) <= 0.0:
            break
        d = problem.sigma.distance(x)
        if d < cfg.distance_floor:
            traj.status = "hit-sigma"
            traj.message = f"distance {d:.3e} under floor at t = {t:.6f}"
            return traj
        if float(np.linalg.norm(x)) > cfg.region_radius:
            traj.status = "exited-region"
            traj.message = f"left the region of radius {cfg.region_radius} at t = {t:.6f}"
            return traj
        try:
            v = problem.kuo_field(x, t)
        except DegenerateGradientError as exc:
            traj.status = "degenerate"
            traj.message = str(exc)
            return traj
        speed = float(np.linalg.norm(v))
        cap = cfg.max_step
        if speed > 0.0:
            cap = min(cap, 0.1 * d / speed)
        dt = direction * min(cap, abs(t1 - t))
        while True:
            if abs(dt) < 1e-15 * max(1.0, abs(t)):
                traj.status = "step-underflow"
                traj.message = f"step collapsed at t = {t:.6f}"
                return traj
            try:
                full = _rk4(problem, x, t, dt)
                half = _rk4(problem, x, t, 0.5 * dt)
                double = _rk4(problem, half, t + 0.5 * dt, 0.5 * dt)
            except DegenerateGradientError as exc:
                traj.status = "degenerate"
                traj.message = str(exc)
                return traj
            err = float(np.linalg.norm(double - full)) / 15.0
            if err <= cfg.tol * (1.0 + float(np.linalg.norm(x))):
                x = double
                t = t + dt
                traj.append(t, x, residual(x, t), problem.sigma.distance(x))
                break
            dt *= 0.5
    else:
        traj.status = "step-underflow"
        traj.message = "step budget exhausted"
        return traj
    return traj


@dataclass
class LevelSetMap:
    seeds: List[np.ndarray]
    endpoints: List[Optional[np.ndarray]]
    residuals: List[Optional[float]]
    trajectories: List[Trajectory]

    @property
    def failures(self) -> List[Tuple[int, str]]:
        return [
            (i, tr.status)
            for i, tr in enumerate(self.trajectories)
            if tr.status != "ok"
        ]

    @property
    def max_residual(self) -> float:
        vals = [r for r in self.residuals if r is not None]
        return max(vals) if vals else math.nan


def map_level_set(
    problem: FlowProblem,
    seeds: Sequence[Sequence[float]],
    t0: float = 0.0,
    t1: float = 1.0,
) -> LevelSetMap:
    """Carry seeds from the t0 level structure to t1; report g-vs-f residuals.

    For t0 = 0, t1 = 1 the residual at a mapped point y is
    ||g(y) - f(seed)||, the defect of the level-set correspondence.
    """
    endpoints: List[Optional[np.ndarray]] = []
    residuals: List[Optional[float]] = []
    trajectories: List[Trajectory] = []
    arr_seeds = [np.array(s, dtype=float) for s in seeds]
    for seed in arr_seeds:
        tr = integrate(problem, seed, t0, t1)
        trajectories.append(tr)
        if tr.status == "ok":
            y = tr.endpoint
            endpoints.append(y)
            start = problem.family_at(seed, t0)
            residuals.append(float(np.linalg.norm(problem.family_at(y, t1) - start)))
        else:
            endpoints.append(None)
            residuals.append(None)
    return LevelSetMap(arr_seeds, endpoints, residuals, trajectories)


def roundtrip_check(
    problem: FlowProblem,
    x0: Sequence[float],
    t0: float = 0.0,
    t1: float = 1.0,
) -> Tuple[float, Trajectory, Trajectory]:
    """Integrate forward then back; the deviation measures invertibility."""
    forward = integrate(problem, x0, t0, t1)
    if forward.status != "ok":
        return math.nan, forward, forward
    backward = integrate(problem, forward.endpoint, t1, t0)
    if backward.status != "ok":
        return math.nan, forward, backward
    dev = float(np.linalg.norm(backward.endpoint - np.array(x0, dtype=float)))
    return dev, forward, backward


def field_bound_constant(
    problem: FlowProblem,
    points: Sequence[Sequence[float]],
    ts: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
) -> float:
    """Largest sampled ratio ||v(x, t)|| / d(x, sigma), the envelope slope C."""
    best = 0.0
    for pt in points:
        x = np.array(pt, dtype=float)
        d = problem.sigma.distance(x)
        if d == 0.0:
            continue
        for t in ts:
            speed = float(np.linalg.norm(problem.kuo_field(x, float(t))))
            best = max(best, speed / d)
    return best


def envelope_violation(traj: Trajectory, c: float) -> float:
    """Worst excess of |log d(x(t)) - log d(x0)| over the band c * |t - t0|.

    Nonpositive values mean the log-distance envelope holds at every sample.
    """
    if not traj.ts or traj.distances[0] <= 0.0:
        return math.nan
    t0 = traj.ts[0]
    log_d0 = math.log(traj.distances[0])
    worst = -math.inf
    for t, d in zip(traj.ts, traj.distances):
        if d <= 0.0:
            return math.inf
        worst = max(worst, abs(math.log(d) - log_d0) - c * abs(t - t0))
    return worst
