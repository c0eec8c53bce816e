"""条件 checkers: shell-ladder exponent estimation plus arc-lattice scanning.

Each sufficiency condition asserts a Lojasiewicz-type lower bound near the
singular set, so its sampling side is always the same experiment: minimize a
nonnegative target over shells d(x, sigma) = eps, fit log(min) against
log(eps), and compare the fitted exponent with the target exponent.  The arc
side scans the exponent lattice for an exact refutation.  Verdicts combine
the two modes conservatively: an exact witness beats sampling evidence, and
disagreement is reported as inconclusive rather than resolved by fiat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .arcs import ScanConfig, arc_scan
from .measures import kuo_kappa_squared, thom_quantity_polynomial
from .numeric import JacobianEvaluator, MapEvaluator, PolyEvaluator
from .poly import PolyMap, Polynomial, as_poly_map, jacobian
from .sigma import SigmaSet, sample_shell
from .verdicts import FAILS, HOLDS, INCONCLUSIVE, LojaFit, Verdict

DEFAULT_SHELLS = tuple(2.0**-k for k in range(3, 13))


# ---------------------------------------------------------------------------
# Shell targets
# ---------------------------------------------------------------------------


class ShellTarget:
    """A nonnegative function minimized over distance shells."""

    label = "target"

    def batch(self, pts: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError


class KappaTarget(ShellTarget):
    def __init__(self, f: Union[Polynomial, PolyMap]):
        self.jac = JacobianEvaluator(f)
        self.label = "kappa(df)"

    def batch(self, pts: np.ndarray) -> np.ndarray:
        return self.jac.kappa(pts)


class MapNormTarget(ShellTarget):
    def __init__(self, f: Union[Polynomial, PolyMap]):
        self.map = MapEvaluator(f)
        self.label = "|f|"

    def batch(self, pts: np.ndarray) -> np.ndarray:
        return self.map.norms(pts)


class CombinedTarget(ShellTarget):
    """d(x, sigma) * kappa(df(x)) + ||f(x)||, the tilde-condition quantity."""

    def __init__(self, f: Union[Polynomial, PolyMap], sigma: SigmaSet):
        self.jac = JacobianEvaluator(f)
        self.map = MapEvaluator(f)
        self.sigma = sigma
        self.label = "d*kappa + |f|"

    def batch(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return self.sigma.distances(pts) * self.jac.kappa(pts) + self.map.norms(pts)


class PolynomialTarget(ShellTarget):
    def __init__(self, poly: Polynomial, label: str):
        self.eval = PolyEvaluator(poly)
        self.label = label

    def batch(self, pts: np.ndarray) -> np.ndarray:
        return self.eval(pts)


# ---------------------------------------------------------------------------
# Shell minimization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LojaConfig:
    shells: Tuple[float, ...] = DEFAULT_SHELLS
    samples_per_shell: int = 320
    box_radius: float = 0.5
    refine_steps: int = 60
    refine_starts: int = 4
    drop_coarsest: int = 2
    seed: int = 0


def _owning_piece(sigma: SigmaSet, x: np.ndarray) -> Tuple[int, ...]:
    best, best_d = None, None
    for piece in sigma.piece_lists():
        d = math.sqrt(sum(float(x[i]) ** 2 for i in piece))
        if best_d is None or d < best_d:
            best, best_d = piece, d
    return best


def _refine_on_shell(
    target: ShellTarget,
    sigma: SigmaSet,
    x0: np.ndarray,
    eps: float,
    cfg: LojaConfig,
    accept: Optional[Callable[[np.ndarray], bool]] = None,
) -> Tuple[float, np.ndarray]:
    """Derivative-free descent of the target along the shell d(x, sigma) = eps.

    Runs compass-search passes from the found point with the step reset each
    time, while a pass still improves the value materially.  The reset
    matters: a pass can end with its step scales collapsed far from where
    the remaining descent needs them.
    """
    value, x = _compass_pass(target, sigma, x0, eps, cfg, accept)
    for _ in range(5):
        improved, x2 = _compass_pass(target, sigma, x, eps, cfg, accept)
        if improved >= value * (1.0 - 1e-3):
            if improved < value:
                value, x = improved, x2
            break
        value, x = improved, x2
    return value, x


def _compass_pass(
    target: ShellTarget,
    sigma: SigmaSet,
    x0: np.ndarray,
    eps: float,
    cfg: LojaConfig,
    accept: Optional[Callable[[np.ndarray], bool]] = None,
) -> Tuple[float, np.ndarray]:
    """One bounded-round compass sweep.

    Moves perturb one coordinate additively (at the shell scale for forced
    coordinates, at the box scale for free ones), rescale it multiplicatively,
    or flip its sign; forced-block moves renormalize back to the shell.  A
    move is taken only when it stays on the shell, inside the box, passes the
    extra acceptance test if any, and strictly decreases the target.  The
    step halves whenever no move helps.  Multiplicative moves make power-law
    valleys reachable whatever their scale, and sign flips let the descent
    escape mirror-image local basins.
    """
    piece = _owning_piece(sigma, x0)
    free = [i for i in range(sigma.nvars) if i not in piece]
    x = np.array(x0, dtype=float)
    value = float(target.batch(x[None, :])[0])
    step = 0.25
    shell_tol = 1.0 - 1e-12
    block_idx = list(piece)
    for _ in range(cfg.refine_steps):
        # Fixed rescale factors cross scales geometrically (the step-scaled
        # pair only polishes); the ladder is dense enough that some factor
        # always lands inside a power-law valley's improving range.
        factors = (4.0, 2.0, 1.5, 1.25, 1.1, 1.0 + step, 1.0 - step,
                   1 / 1.1, 1 / 1.25, 1 / 1.5, 0.5, 0.25)
        raw = []
        for j in piece:
            for s in (1.0, -1.0):
                cand = x.copy()
                cand[j] += s * step * eps
                raw.append(cand)
            if x[j] != 0.0:
                for mult in factors:
                    cand = x.copy()
                    cand[j] *= mult
                    raw.append(cand)
        candidates = []
        for cand in raw:
            block = cand[block_idx]
            norm = float(np.linalg.norm(block))
            if norm == 0.0:
                continue
            cand[block_idx] = block * (eps / norm)
            candidates.append(cand)
        for i in free:
            for s in (1.0, -1.0):
                cand = x.copy()
                cand[i] = float(np.clip(cand[i] + s * step * cfg.box_radius,
                                        -cfg.box_radius, cfg.box_radius))
                candidates.append(cand)
            if x[i] != 0.0:
                for mult in factors:
                    if abs(x[i] * mult) <= cfg.box_radius:
                        cand = x.copy()
                        cand[i] *= mult
                        candidates.append(cand)
        for j in range(sigma.nvars):
            if x[j] != 0.0:
                cand = x.copy()
                cand[j] = -cand[j]
                candidates.append(cand)
        admissible = [
            c
            for c in candidates
            if sigma.distance(c) >= eps * shell_tol and (accept is None or accept(c))
        ]
        if admissible:
            arr = np.stack(admissible)
            vals = target.batch(arr)
            k = int(np.argmin(vals))
            if vals[k] < value:
                x, value = arr[k], float(vals[k])
                continue
        step *= 0.5
    return value, x


def _power_fit(eps: Sequence[float], minima: Sequence[float]):
    logs_e = np.log(np.asarray(eps, dtype=float))
    logs_m = np.log(np.asarray(minima, dtype=float))
    if float(np.ptp(logs_m)) < 1e-3:
        # A flat ladder is a perfect zero-exponent fit; the usual r^2 is
        # meaningless there (all variation is roundoff).
        return 0.0, float(math.exp(np.mean(logs_m))), 1.0
    slope, intercept = np.polyfit(logs_e, logs_m, 1)
    pred = slope * logs_e + intercept
    ss_res = float(np.sum((logs_m - pred) ** 2))
    ss_tot = float(np.sum((logs_m - np.mean(logs_m)) ** 2))
    r2 = 1.0 if ss_tot < 1e-30 else 1.0 - ss_res / ss_tot
    return float(slope), float(math.exp(intercept)), float(r2)


def loja_exponent(
    target: Union[ShellTarget, Polynomial, PolyMap],
    sigma: SigmaSet,
    config: Optional[LojaConfig] = None,
    accept: Optional[Callable[[float, np.ndarray], bool]] = None,
) -> LojaFit:
    """Fit min over the shell d(x, sigma) = eps of the target as C * eps^alpha.

    Shells run from coarse to fine; the configured number of coarsest shells
    is excluded from the regression (transient constants), and shells whose
    minimum is zero or where no admissible sample exists are recorded as
    degenerate and skipped.  Fewer than three usable shells leave the fit
    undetermined.
    """
    cfg = config or LojaConfig()
    if isinstance(target, Polynomial):
        target = PolynomialTarget(target, "poly")
    elif isinstance(target, PolyMap):
        target = MapNormTarget(target)
    rng = np.random.default_rng(cfg.seed)
    eps_list: List[float] = []
    minima: List[float] = []
    argmins: List[Tuple[float, ...]] = []
    degenerate: List[float] = []
    for eps in sorted(cfg.shells, reverse=True):
        pts = sample_shell(sigma, eps, cfg.samples_per_shell, rng, cfg.box_radius)
        point_accept = None
        if accept is not None:
            point_accept = lambda c, _e=eps: accept(_e, c)  # noqa: E731
            mask = np.array([point_accept(row) for row in pts])
            pts = pts[mask]
            if pts.shape[0] == 0:
                degenerate.append(eps)
                continue
        vals = target.batch(pts)
        order = np.argsort(vals)
        best_val, best_arg = float(vals[order[0]]), pts[order[0]]
        for idx in order[: cfg.refine_starts]:
            v, arg = _refine_on_shell(
                target, sigma, pts[idx], eps, cfg, accept=point_accept
            )
            if v < best_val:
                best_val, best_arg = v, arg
        if not best_val > 0.0:
            degenerate.append(eps)
            eps_list.append(eps)
            minima.append(best_val)
            argmins.append(tuple(float(v) for v in best_arg))
            continue
        eps_list.append(eps)
        minima.append(best_val)
        argmins.append(tuple(float(v) for v in best_arg))
    usable = [
        (e, m)
        for e, m in zip(eps_list, minima)
        if m > 0.0 and e not in degenerate
    ]
    usable = usable[cfg.drop_coarsest :]
    if len(usable) < 3:
        alpha = c_hat = r2 = None
    else:
        alpha, c_hat, r2 = _power_fit([e for e, _ in usable], [m for _, m in usable])
    return LojaFit(
        target_label=target.label,
        eps=eps_list,
        minima=minima,
        argmins=argmins,
        alpha_hat=alpha,
        c_hat=c_hat,
        r_squared=r2,
        dropped_coarsest=cfg.drop_coarsest,
        degenerate_eps=degenerate,
        seed=cfg.seed,
    )


# ---------------------------------------------------------------------------
# Combined condition checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckConfig:
    loja: LojaConfig = field(default_factory=LojaConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    alpha_tol: float = 0.15
    min_r2: float = 0.98

    def seeded(self, seed: int) -> "CheckConfig":
        return replace(
            self, loja=replace(self.loja, seed=seed), scan=replace(self.scan, seed=seed)
        )


def _sampling_status(
    fit: LojaFit, target_exponent: float, cfg: CheckConfig
) -> Tuple[str, dict]:
    if not fit.usable():
        return INCONCLUSIVE, {"sampling_note": "fit undetermined"}
    if fit.r_squared is not None and fit.r_squared < cfg.min_r2:
        return INCONCLUSIVE, {
            "sampling_note": f"poor fit (r^2 = {fit.r_squared:.4f})"
        }
    if fit.alpha_hat <= target_exponent + cfg.alpha_tol:
        return HOLDS, {}
    return FAILS, {
        "sampling_note": (
            f"fitted exponent {fit.alpha_hat:.3f} exceeds target "
            f"{target_exponent:+.3f} + {cfg.alpha_tol}"
        )
    }


def _combine(
    condition: str,
    r: int,
    arc_verdict: Verdict,
    fit: LojaFit,
    sampling_status: str,
    notes: dict,
    delta_estimate=None,
) -> Verdict:
    diagnostics = dict(arc_verdict.diagnostics)
    diagnostics.update(notes)
    if arc_verdict.status == FAILS:
        return Verdict(
            condition=condition,
            r=r,
            mode="combined",
            status=FAILS,
            witness=arc_verdict.witness,
            witness_profile=arc_verdict.witness_profile,
            alpha_hat=fit.alpha_hat,
            c_hat=fit.c_hat,
            delta_estimate=arc_verdict.delta_estimate,
            fits=[fit],
            diagnostics=diagnostics,
        )
    if arc_verdict.status == HOLDS and sampling_status == HOLDS:
        status = HOLDS
    else:
        status = INCONCLUSIVE
        diagnostics.setdefault(
            "disagreement",
            f"arc mode {arc_verdict.status}, sampling mode {sampling_status}",
        )
    return Verdict(
        condition=condition,
        r=r,
        mode="combined",
        status=status,
        alpha_hat=fit.alpha_hat,
        c_hat=fit.c_hat,
        delta_estimate=delta_estimate
        if delta_estimate is not None
        else arc_verdict.delta_estimate,
        fits=[fit],
        diagnostics=diagnostics,
    )


def check_kuiper_kuo(
    f: Union[Polynomial, PolyMap],
    sigma: SigmaSet,
    r: int,
    config: Optional[CheckConfig] = None,
) -> Verdict:
    """kappa(df) >~ d(x, sigma)^(r-1): exact arc scan plus shell-fit evidence."""
    cfg = config or CheckConfig()
    fm = as_poly_map(f)
    arc_v = arc_scan(fm, sigma, r, "kk", cfg.scan)
    fit = loja_exponent(KappaTarget(fm), sigma, cfg.loja)
    status, notes = _sampling_status(fit, r - 1, cfg)
    return _combine("kk", r, arc_v, fit, status, notes)


def check_second_kuiper_kuo(
    f: Union[Polynomial, PolyMap],
    sigma: SigmaSet,
    r: int,
    config: Optional[CheckConfig] = None,
) -> Verdict:
    """kappa(df) >~ d^(r - delta) for some delta > 0; delta is estimated.

    The reported delta estimate prefers the exact minimum of the arc-level
    delta budgets over the scanned lattice; the sampled value r - alpha_hat
    (capped at r) appears in the diagnostics.
    """
    cfg = config or CheckConfig()
    fm = as_poly_map(f)
    arc_v = arc_scan(fm, sigma, r, "kk-delta", cfg.scan)
    fit = loja_exponent(KappaTarget(fm), sigma, cfg.loja)
    notes: dict = {}
    if not fit.usable():
        status = INCONCLUSIVE
        notes["sampling_note"] = "fit undetermined"
        delta = None
    else:
        delta = min(float(r), r - fit.alpha_hat)
        notes["sampling_delta"] = delta
        if fit.r_squared is not None and fit.r_squared < cfg.min_r2:
            status = INCONCLUSIVE
            notes["sampling_note"] = f"poor fit (r^2 = {fit.r_squared:.4f})"
        elif delta >= cfg.alpha_tol:
            status = HOLDS
        elif delta <= -cfg.alpha_tol:
            status = FAILS
            notes["sampling_note"] = f"delta estimate {delta:.3f} is negative"
        else:
            status = INCONCLUSIVE
            notes["sampling_note"] = f"delta estimate {delta:.3f} within tolerance of 0"
    if arc_v.delta_estimate is not None:
        delta = arc_v.delta_estimate
    return _combine("kk-delta", r, arc_v, fit, status, notes, delta_estimate=delta)


def check_ktilde(
    f: Union[Polynomial, PolyMap],
    sigma: SigmaSet,
    r: int,
    config: Optional[CheckConfig] = None,
) -> Verdict:
    """d * kappa(df) + ||f|| >~ d^r, the horn-regularity form."""
    cfg = config or CheckConfig()
    fm = as_poly_map(f)
    arc_v = arc_scan(fm, sigma, r, "ktilde", cfg.scan)
    fit = loja_exponent(CombinedTarget(fm, sigma), sigma, cfg.loja)
    status, notes = _sampling_status(fit, r, cfg)
    return _combine("ktilde", r, arc_v, fit, status, notes)


def check_ktilde_delta(
    f: Union[Polynomial, PolyMap],
    sigma: SigmaSet,
    r: int,
    config: Optional[CheckConfig] = None,
) -> Verdict:
    """d * kappa + ||f|| >~ d^(r+1-delta) for some delta > 0.

    An arc meeting the threshold exactly (delta budget zero) refutes every
    positive delta along itself but sits on the boundary of the estimated
    family; such witnesses downgrade the verdict to inconclusive instead of
    failing it, while a strict order excess fails outright.
    """
    cfg = config or CheckConfig()
    fm = as_poly_map(f)
    arc_v = arc_scan(fm, sigma, r, "ktilde-delta", cfg.scan)
    fit = loja_exponent(CombinedTarget(fm, sigma), sigma, cfg.loja)
    notes: dict = {}
    if not fit.usable():
        sampling, delta = INCONCLUSIVE, None
        notes["sampling_note"] = "fit undetermined"
    else:
        delta = (r + 1) - fit.alpha_hat
        notes["sampling_delta"] = delta
        if fit.r_squared is not None and fit.r_squared < cfg.min_r2:
            sampling = INCONCLUSIVE
            notes["sampling_note"] = f"poor fit (r^2 = {fit.r_squared:.4f})"
        elif delta >= cfg.alpha_tol:
            sampling = HOLDS
        elif delta <= -cfg.alpha_tol:
            sampling = FAILS
            notes["sampling_note"] = f"delta estimate {delta:.3f} is negative"
        else:
            sampling = INCONCLUSIVE
            notes["sampling_note"] = f"delta estimate {delta:.3f} within tolerance of 0"
    if arc_v.delta_estimate is not None:
        delta = arc_v.delta_estimate
    if arc_v.status == FAILS:
        budget = arc_v.witness_profile.delta_max("ktilde-delta")
        if budget == 0:
            diagnostics = dict(arc_v.diagnostics)
            diagnostics.update(notes)
            diagnostics["boundary_witness"] = (
                "an arc meets the (r+1) threshold exactly; no positive delta "
                "survives it, but the excess is not strict"
            )
            return Verdict(
                condition="ktilde-delta",
                r=r,
                mode="combined",
                status=INCONCLUSIVE,
                witness=arc_v.witness,
                witness_profile=arc_v.witness_profile,
                alpha_hat=fit.alpha_hat,
                c_hat=fit.c_hat,
                delta_estimate=delta,
                fits=[fit],
                diagnostics=diagnostics,
            )
    return _combine("ktilde-delta", r, arc_v, fit, sampling, notes, delta_estimate=delta)


def check_kuo_horn(
    f: Union[Polynomial, PolyMap],
    sigma: SigmaSet,
    r: int,
    width: Union[int, float, Fraction] = 1,
    config: Optional[CheckConfig] = None,
) -> Verdict:
    """kappa(df) >~ d^(r-1) inside the horn ||f|| <= width * d^r.

    Sampling-only: shell samples are filtered by horn membership and the
    minimization is constrained to stay inside the horn.  A horn point off
    sigma where df drops rank (exact check) is an immediate witness.  The
    verdict is width-sensitive; by horn-regularity this check agrees with
    the tilde condition for small widths.

    The feasible set cut out by the horn boundary drifts with eps, which
    adds slowly decaying corrections to the shell minima; the exponent is
    therefore fitted on the four finest shells only.
    """
    cfg = config or CheckConfig()
    fm = as_poly_map(f)
    norms = MapEvaluator(fm)
    w = float(width)

    def in_horn(eps: float, point: np.ndarray) -> bool:
        return float(norms.norms(point[None, :])[0]) <= w * eps**r * (1 + 1e-9)

    loja_cfg = replace(
        cfg.loja,
        samples_per_shell=4 * cfg.loja.samples_per_shell,
        drop_coarsest=max(cfg.loja.drop_coarsest, len(cfg.loja.shells) - 4),
    )
    target = KappaTarget(fm)
    target.label = "kappa(df) on horn"
    fit = loja_exponent(target, sigma, loja_cfg, accept=in_horn)
    usable_shells = [e for e, m in zip(fit.eps, fit.minima) if m > 0.0]
    status, notes = _sampling_status(fit, r - 1, cfg)
    witness = None
    jac_rows = jacobian(fm)
    for e, m, arg in zip(fit.eps, fit.minima, fit.argmins):
        if m == 0.0:
            exact_point = [Fraction(v) for v in arg]
            mat = [[entry.eval(exact_point) for entry in row] for row in jac_rows]
            if kuo_kappa_squared(mat) == 0 and not sigma.contains(arg):
                witness = tuple(arg)
                status = FAILS
                notes["witness_note"] = "rank-deficient differential inside the horn"
                break
    if not usable_shells and witness is None:
        status = INCONCLUSIVE
        notes["sampling_note"] = "no horn points found on any shell"
    diagnostics = {
        "width": w,
        "shells_with_horn_points": len(usable_shells),
        **notes,
    }
    if status == FAILS and witness is None:
        witness = fit.argmins[-1] if fit.argmins else None
        diagnostics["witness_note"] = "finest-shell argmin; exponent evidence only"
    return Verdict(
        condition="kuo-horn",
        r=r,
        mode="sampling",
        status=status,
        witness=witness,
        alpha_hat=fit.alpha_hat,
        c_hat=fit.c_hat,
        fits=[fit],
        diagnostics=diagnostics,
    )


def thom_check(
    f: Union[Polynomial, PolyMap],
    sigma: SigmaSet,
    a: float,
    config: Optional[CheckConfig] = None,
) -> Verdict:
    """T_2(f, .) >~ d(x, sigma)^a on shells (sampling evidence only)."""
    cfg = config or CheckConfig()
    fm = as_poly_map(f)
    t2 = thom_quantity_polynomial(fm, 2)
    fit = loja_exponent(PolynomialTarget(t2, "T_2"), sigma, cfg.loja)
    status, notes = _sampling_status(fit, a, cfg)
    witness = None
    if status == FAILS and fit.argmins:
        witness = fit.argmins[-1]
        notes["witness_note"] = "finest-shell argmin; exponent evidence only"
    return Verdict(
        condition="thom",
        r=None,
        mode="sampling",
        status=status,
        witness=witness,
        alpha_hat=fit.alpha_hat,
        c_hat=fit.c_hat,
        fits=[fit],
        diagnostics={"target_exponent": a, **notes},
    )


def ellipticity_check(
    generators: Sequence[Polynomial],
    sigma: SigmaSet,
    config: Optional[CheckConfig] = None,
) -> Verdict:
    """Ellipticity of an ideal along sigma via its sum-of-squares element.

    The target is Z = sum g_i^2; positivity of the shell minima with a
    stable power-law fit is evidence that Z (hence the ideal) is elliptic,
    and the fitted pair (alpha, C) describes Z >= C * d^alpha.
    """
    if not generators:
        raise ValueError("need at least one generator")
    cfg = config or CheckConfig()
    n = generators[0].nvars
    z = Polynomial.zero(n)
    for g in generators:
        z = z + g * g
    fit = loja_exponent(PolynomialTarget(z, "sum of squared generators"), sigma, cfg.loja)
    zero_shells = [e for e, m in zip(fit.eps, fit.minima) if not m > 0.0]
    if zero_shells:
        status = FAILS
        notes = {"witness_note": f"zero minimum on shells {zero_shells}"}
        witness = fit.argmins[fit.eps.index(zero_shells[0])]
    elif not fit.usable() or (fit.r_squared or 0.0) < cfg.min_r2:
        status, notes, witness = INCONCLUSIVE, {"sampling_note": "unstable fit"}, None
    else:
        status, notes, witness = HOLDS, {}, None
    return Verdict(
        condition="elliptic",
        r=None,
        mode="sampling",
        status=status,
        witness=witness,
        alpha_hat=fit.alpha_hat,
        c_hat=fit.c_hat,
        fits=[fit],
        diagnostics=notes,
    )


_CONDITION_EXPONENT = {
    "kk": lambda r: r - 1,
    "kk-delta": lambda r: r,
    "ktilde": lambda r: r,
    "ktilde-delta": lambda r: r + 1,
    "kz": lambda r: r + 1,
}


def arc_ratio_table(
    f: Union[Polynomial, PolyMap],
    sigma: SigmaSet,
    r: int,
    condition: str,
    arc,
    ks: Sequence[int] = tuple(range(3, 13)),
) -> List[Tuple[float, float]]:
    """Empirical condition ratios target(lambda(t)) / d(lambda(t))^e at t = 2^-k.

    For an arc that violates the condition the ratio decays to zero along
    the ladder, so sampling sees what the order computation proved.
    """
    if condition not in _CONDITION_EXPONENT:
        raise ValueError(f"unknown condition {condition!r}")
    fm = as_poly_map(f)
    exponent = _CONDITION_EXPONENT[condition](r)
    if condition in ("kk", "kk-delta"):
        target: ShellTarget = KappaTarget(fm)
    else:
        target = CombinedTarget(fm, sigma)
    pts = np.array([arc.eval_float(2.0**-k) for k in ks], dtype=float)
    values = target.batch(pts)
    dists = sigma.distances(pts)
    out = []
    for k, val, d in zip(ks, values, dists):
        out.append((2.0**-k, float(val) / float(d) ** exponent))
    return out
