"""Bundled example corpus and its runner.

Each entry names a map, a sigma set, and a list of checks with expected
outcomes.  Expected values carry a provenance tag: "reported" for claims
taken from the source material, "derived" for values computed independently
of the implementation, "direct" for immediate evaluations.  Entries run in
parallel; results are assembled in corpus order.
"""

from __future__ import annotations

import importlib.resources
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .arcs import ScanConfig, arc_scan
from .conditions import (
    CheckConfig,
    CombinedTarget,
    KappaTarget,
    MapNormTarget,
    check_ktilde,
    check_ktilde_delta,
    check_kuiper_kuo,
    check_kuo_horn,
    check_second_kuiper_kuo,
    loja_exponent,
    thom_check,
)
from .flow import FlowProblem, integrate, roundtrip_check
from .measures import km_tm_ratio_scan, kuo_quantity, thom_quantity
from .parsing import parse_poly_map, parse_sigma
from .poly import PolyMap
from .sigma import SigmaSet
from .verdicts import FAILS, HOLDS, INCONCLUSIVE, Verdict

PROVENANCE_TAGS = ("reported", "derived", "direct")

_STATUS_WORD = {"holds": HOLDS, "fails": FAILS, "inconclusive": INCONCLUSIVE}
_WORD_STATUS = {v: k for k, v in _STATUS_WORD.items()}

_CONDITION_FUNCS = {
    "kk": check_kuiper_kuo,
    "kk-delta": check_second_kuiper_kuo,
    "ktilde": check_ktilde,
    "ktilde-delta": check_ktilde_delta,
}


class CorpusSchemaError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    map_text: str
    sigma_text: str
    nvars: Optional[int]
    r: Optional[int]
    checks: Tuple[Dict[str, Any], ...]
    title: str = ""
    notes: str = ""

    def poly_map(self) -> PolyMap:
        return parse_poly_map(self.map_text, self.nvars)

    def sigma(self) -> SigmaSet:
        return parse_sigma(self.sigma_text, self.poly_map().nvars)


@dataclass
class CheckOutcome:
    entry_id: str
    description: str
    provenance: str
    ok: bool
    inconclusive: bool
    expected: str
    observed: str
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "entry": self.entry_id,
            "check": self.description,
            "provenance": self.provenance,
            "ok": self.ok,
            "inconclusive": self.inconclusive,
            "expected": self.expected,
            "observed": self.observed,
            "detail": self.detail,
        }


@dataclass
class EntryResult:
    entry: CorpusEntry
    outcomes: List[CheckOutcome]
    elapsed: float
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error and all(o.ok for o in self.outcomes)


@dataclass
class CorpusResult:
    results: List[EntryResult]

    @property
    def mismatches(self) -> List[CheckOutcome]:
        out = [o for r in self.results for o in r.outcomes if not o.ok]
        out += [
            CheckOutcome(r.entry.id, "entry", "direct", False, False, "runs", "error", r.error)
            for r in self.results
            if r.error
        ]
        return out

    @property
    def inconclusive_present(self) -> bool:
        return any(o.inconclusive for r in self.results for o in r.outcomes)

    @property
    def exit_code(self) -> int:
        if self.mismatches:
            return 1
        if self.inconclusive_present:
            return 2
        return 0

    def table_text(self) -> str:
        lines = []
        for r in self.results:
            flag = "ok" if r.ok else "FAIL"
            lines.append(f"[{flag}] {r.entry.id}  ({r.elapsed:.1f}s)")
            if r.error:
                lines.append(f"       error: {r.error}")
            for o in r.outcomes:
                mark = "pass" if o.ok else "FAIL"
                line = f"  {mark}  {o.description}: expected {o.expected}, got {o.observed}"
                if o.detail:
                    line += f"  [{o.detail}]"
                lines.append(line)
        return "\n".join(lines)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "entries": [
                {
                    "id": r.entry.id,
                    "ok": r.ok,
                    "elapsed_s": round(r.elapsed, 3),
                    "error": r.error,
                    "checks": [o.to_dict() for o in r.outcomes],
                }
                for r in self.results
            ],
            "exit_code": self.exit_code,
        }


# -- loading -----------------------------------------------------------------


def default_corpus_path() -> Path:
    return Path(importlib.resources.files("jetlab") / "data" / "corpus.json")


def load_corpus(path: Union[str, Path, None] = None) -> List[CorpusEntry]:
    raw = json.loads(Path(path or default_corpus_path()).read_text())
    entries = []
    seen = set()
    for item in raw.get("entries", []):
        entry = _entry_from_dict(item)
        if entry.id in seen:
            raise CorpusSchemaError(f"duplicate entry id {entry.id!r}")
        seen.add(entry.id)
        entries.append(entry)
    if not entries:
        raise CorpusSchemaError("corpus has no entries")
    return entries


def _entry_from_dict(item: Dict[str, Any]) -> CorpusEntry:
    for key in ("id", "map", "sigma", "checks"):
        if key not in item:
            raise CorpusSchemaError(f"corpus entry missing {key!r}: {item.get('id', item)}")
    checks = []
    for chk in item["checks"]:
        if "kind" not in chk:
            raise CorpusSchemaError(f"check without kind in entry {item['id']!r}")
        if chk["kind"] not in _RUNNERS:
            raise CorpusSchemaError(
                f"unknown check kind {chk['kind']!r} in entry {item['id']!r}"
            )
        prov = chk.get("provenance")
        if prov not in PROVENANCE_TAGS:
            raise CorpusSchemaError(
                f"check in entry {item['id']!r} needs provenance from {PROVENANCE_TAGS}, got {prov!r}"
            )
        checks.append(dict(chk))
    return CorpusEntry(
        id=str(item["id"]),
        map_text=str(item["map"]),
        sigma_text=str(item["sigma"]),
        nvars=item.get("nvars"),
        r=item.get("r"),
        checks=tuple(checks),
        title=item.get("title", ""),
        notes=item.get("notes", ""),
    )


# -- running -----------------------------------------------------------------


def _frac(value) -> Fraction:
    if isinstance(value, dict):
        return Fraction(int(value["num"]), int(value.get("den", 1)))
    return Fraction(str(value))


def _status_outcome(
    entry: CorpusEntry, desc: str, chk: Dict[str, Any], verdict: Verdict
) -> CheckOutcome:
    expected = chk["expect"]
    observed = _WORD_STATUS[verdict.status]
    detail = ""
    if verdict.alpha_hat is not None:
        detail = f"alpha_hat={verdict.alpha_hat:.4f}"
    return CheckOutcome(
        entry_id=entry.id,
        description=desc,
        provenance=chk["provenance"],
        ok=observed == expected,
        inconclusive=verdict.status == INCONCLUSIVE,
        expected=expected,
        observed=observed,
        detail=detail,
    )


def _check_config(chk: Dict[str, Any], seed: int) -> CheckConfig:
    cfg = CheckConfig().seeded(seed)
    if "max_exponent" in chk:
        from dataclasses import replace

        cfg = replace(cfg, scan=replace(cfg.scan, max_exponent=int(chk["max_exponent"])))
    return cfg


def _run_condition(entry: CorpusEntry, chk: Dict[str, Any], seed: int) -> List[CheckOutcome]:
    fm = entry.poly_map()
    sigma = entry.sigma()
    r = int(chk.get("r", entry.r))
    cond = chk["condition"]
    cfg = _check_config(chk, seed)
    if cond == "kuo":
        verdict = check_kuo_horn(fm, sigma, r, chk.get("w", 1), cfg)
    elif cond in _CONDITION_FUNCS:
        verdict = _CONDITION_FUNCS[cond](fm, sigma, r, cfg)
    else:
        raise CorpusSchemaError(f"unknown condition {cond!r} in entry {entry.id!r}")
    outcomes = [_status_outcome(entry, f"{cond} at r={r}", chk, verdict)]
    if "delta" in chk:
        want = _frac(chk["delta"])
        got = verdict.delta_estimate
        ok = got is not None and (
            got == want if isinstance(got, Fraction) else abs(float(got) - float(want)) <= 1e-9
        )
        outcomes.append(
            CheckOutcome(
                entry.id,
                f"{cond} delta at r={r}",
                chk["provenance"],
                ok,
                False,
                str(want),
                str(got),
            )
        )
    if "witness_orders" in chk:
        want = chk["witness_orders"]
        prof = verdict.witness_profile
        got = (
            {"d": prof.ord_d, "kappa": prof.ord_kappa, "f": prof.ord_f}
            if prof is not None
            else None
        )
        ok = got is not None and all(got[k] == want[k] for k in want)
        outcomes.append(
            CheckOutcome(
                entry.id,
                f"{cond} witness orders",
                chk["provenance"],
                ok,
                False,
                str(dict(want)),
                str(got),
            )
        )
    return outcomes


def _run_arc_scan(entry: CorpusEntry, chk: Dict[str, Any], seed: int) -> List[CheckOutcome]:
    fm = entry.poly_map()
    sigma = entry.sigma()
    r = int(chk.get("r", entry.r))
    cfg = ScanConfig(
        max_exponent=int(chk.get("max_exponent", 10)),
        terms_per_component=int(chk.get("terms", 1)),
        seed=seed,
    )
    verdict = arc_scan(fm, sigma, r, chk["condition"], cfg)
    desc = f"arc-scan {chk['condition']} at r={r} (max_exponent {cfg.max_exponent})"
    return [_status_outcome(entry, desc, chk, verdict)]


_LOJA_TARGETS = {
    "kappa": lambda fm, sigma: KappaTarget(fm),
    "map-norm": lambda fm, sigma: MapNormTarget(fm),
    "combined": lambda fm, sigma: CombinedTarget(fm, sigma),
}


def _run_loja(entry: CorpusEntry, chk: Dict[str, Any], seed: int) -> List[CheckOutcome]:
    fm = entry.poly_map()
    sigma = (
        parse_sigma(chk["sigma"], fm.nvars) if "sigma" in chk else entry.sigma()
    )
    target = _LOJA_TARGETS[chk.get("target", "kappa")](fm, sigma)
    cfg = CheckConfig().seeded(seed).loja
    fit = loja_exponent(target, sigma, cfg)
    want = float(chk["alpha"])
    tol = float(chk.get("tol", 0.15))
    ok = fit.usable() and abs(fit.alpha_hat - want) <= tol
    return [
        CheckOutcome(
            entry.id,
            f"loja {target.label} vs {chk.get('sigma', entry.sigma_text)}",
            chk["provenance"],
            ok,
            not fit.usable(),
            f"{want} +/- {tol}",
            f"{fit.alpha_hat:.4f}" if fit.usable() else "undetermined",
            detail=f"r_squared={fit.r_squared:.4f}" if fit.usable() else "",
        )
    ]


def _run_ratio_scan(entry: CorpusEntry, chk: Dict[str, Any], seed: int) -> List[CheckOutcome]:
    fm = entry.poly_map()
    k_lo, k_hi = chk.get("shell_range", [3, 10])
    shells = [2.0**-k for k in range(int(k_lo), int(k_hi) + 1)]
    result = km_tm_ratio_scan(
        fm, int(chk.get("m", 2)), shells, int(chk.get("samples", 500)), seed
    )
    lo, hi = float(result.global_min()), float(result.global_max())
    want_lo = float(chk.get("min_ratio_at_least", 1.0))
    want_hi = float(chk.get("max_ratio_at_most", 100.0))
    ok = lo >= want_lo and hi <= want_hi
    return [
        CheckOutcome(
            entry.id,
            f"K_{result.m}/T_{result.m} ratio scan",
            chk["provenance"],
            ok,
            False,
            f"[{want_lo}, {want_hi}]",
            f"[{lo:.3f}, {hi:.3f}]",
        )
    ]


def _run_measure_point(entry: CorpusEntry, chk: Dict[str, Any], seed: int) -> List[CheckOutcome]:
    fm = entry.poly_map()
    point = [Fraction(str(v)) for v in chk["point"]]
    m = int(chk.get("m", 2))
    got = {"K": kuo_quantity(fm, point, m), "T": thom_quantity(fm, point, m)}
    outcomes = []
    for name, want_raw in chk["expect"].items():
        want = _frac(want_raw)
        value = got[name[0]]
        outcomes.append(
            CheckOutcome(
                entry.id,
                f"{name} at {tuple(str(v) for v in point)}",
                chk["provenance"],
                value == want,
                False,
                str(want),
                str(value),
            )
        )
    return outcomes


def _run_thom(entry: CorpusEntry, chk: Dict[str, Any], seed: int) -> List[CheckOutcome]:
    fm = entry.poly_map()
    sigma = (
        parse_sigma(chk["sigma"], fm.nvars) if "sigma" in chk else entry.sigma()
    )
    verdict = thom_check(fm, sigma, float(chk["a"]), CheckConfig().seeded(seed))
    return [_status_outcome(entry, f"thom at a={chk['a']}", chk, verdict)]


def _run_flow(entry: CorpusEntry, chk: Dict[str, Any], seed: int) -> List[CheckOutcome]:
    fm = entry.poly_map()
    sigma = entry.sigma()
    g = parse_poly_map(chk["g"], fm.nvars)
    problem = FlowProblem(fm, g, sigma, int(chk.get("r", entry.r)))
    res_cap = float(chk.get("residual_max", 1e-6))
    round_cap = float(chk.get("roundtrip_max", 1e-6))
    outcomes = []
    worst_res, worst_round, bad_status = 0.0, 0.0, []
    for s in chk.get("seeds", []):
        x0 = [float(v) for v in s]
        traj = integrate(problem, x0)
        if traj.status != "ok":
            bad_status.append(traj.status)
        worst_res = max(worst_res, traj.max_residual)
        dev, _, _ = roundtrip_check(problem, x0)
        worst_round = max(worst_round, dev if dev == dev else float("inf"))
    ok = not bad_status and worst_res <= res_cap and worst_round <= round_cap
    outcomes.append(
        CheckOutcome(
            entry.id,
            "flow residual and roundtrip",
            chk["provenance"],
            ok,
            False,
            f"residual<={res_cap:g}, roundtrip<={round_cap:g}, status ok",
            f"residual={worst_res:.2e}, roundtrip={worst_round:.2e}"
            + (f", status={bad_status}" if bad_status else ""),
        )
    )
    immobile = True
    for s in chk.get("sigma_seeds", []):
        x0 = [float(v) for v in s]
        traj = integrate(problem, x0)
        if list(traj.endpoint) != x0 or any(r != 0.0 for r in traj.residuals):
            immobile = False
    if chk.get("sigma_seeds"):
        outcomes.append(
            CheckOutcome(
                entry.id,
                "sigma seeds immobile",
                chk["provenance"],
                immobile,
                False,
                "endpoint == seed exactly",
                "immobile" if immobile else "moved",
            )
        )
    return outcomes


_RUNNERS = {
    "condition": _run_condition,
    "arc-scan": _run_arc_scan,
    "loja": _run_loja,
    "ratio-scan": _run_ratio_scan,
    "measure-point": _run_measure_point,
    "thom": _run_thom,
    "flow": _run_flow,
}


def run_entry(entry: CorpusEntry, seed: int = 0) -> EntryResult:
    start = time.perf_counter()
    outcomes: List[CheckOutcome] = []
    error = ""
    try:
        for chk in entry.checks:
            runner = _RUNNERS.get(chk["kind"])
            if runner is None:
                raise CorpusSchemaError(f"unknown check kind {chk['kind']!r}")
            outcomes.extend(runner(entry, chk, seed))
    except CorpusSchemaError:
        raise
    except Exception as exc:  # pragma: no cover - entry isolation
        error = f"{type(exc).__name__}: {exc}"
    return EntryResult(entry, outcomes, time.perf_counter() - start, error)


def run_corpus(
    entries: Optional[Sequence[CorpusEntry]] = None,
    filter: Optional[str] = None,
    seed: int = 0,
    jobs: Optional[int] = None,
) -> CorpusResult:
    if entries is None:
        entries = load_corpus()
    if filter:
        entries = [e for e in entries if filter in e.id]
        if not entries:
            raise CorpusSchemaError(f"no corpus entry matches {filter!r}")
    workers = jobs or min(len(entries), 8)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda e: run_entry(e, seed), entries))
    return CorpusResult(results)
