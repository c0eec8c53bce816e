"""Command-line front end.

Subcommands: measure, check, arc-scan, loja, flow, corpus.  Map and sigma
arguments accept either inline text ("x^3 - 3*x*y^5", "{x1=0}|{x2=0}",
"origin") or a path to a JSON file in the canonical dict form.  With a fixed
seed and inputs the JSON report is byte-identical between runs.

Exit codes: 0 all expectations met, 1 mismatch or failed condition,
2 inconclusive results present, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .arcs import ArcScanError, ScanConfig, arc_scan
from .conditions import (
    CheckConfig,
    CombinedTarget,
    KappaTarget,
    LojaConfig,
    MapNormTarget,
    check_ktilde,
    check_ktilde_delta,
    check_kuiper_kuo,
    check_kuo_horn,
    check_second_kuiper_kuo,
    ellipticity_check,
    loja_exponent,
    thom_check,
)
from .corpus import CorpusSchemaError, load_corpus, run_corpus
from .flow import FlowConfig, FlowProblem, integrate
from .measures import km_tm_ratio_scan, kuo_quantity, measure_report, thom_quantity
from .parsing import (
    ParseError,
    map_from_dict,
    map_to_text,
    parse_poly_map,
    parse_sigma,
    sigma_from_dict,
    sigma_to_text,
)
from .poly import PolyMap
from .report import canonical_json, emit_fit_files, emit_trajectory_files
from .sigma import SigmaSet, ShellSamplingError
from .verdicts import FAILS, HOLDS, INCONCLUSIVE, Verdict

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 3


class CliInputError(ValueError):
    pass


# -- input loading -----------------------------------------------------------


def _load_map(spec: str, nvars: Optional[int] = None) -> PolyMap:
    path = Path(spec)
    if spec.endswith(".json"):
        if not path.is_file():
            raise CliInputError(f"map file not found: {spec}")
        data = json.loads(path.read_text())
        if "components" in data:
            return map_from_dict(data)
        if "terms" in data:
            return map_from_dict({"nvars": data["nvars"], "components": [data["terms"]]})
        raise CliInputError(f"{spec} is not a map in the canonical dict form")
    return parse_poly_map(spec, nvars)


def _load_sigma(spec: str, nvars: int) -> SigmaSet:
    if spec.endswith(".json"):
        path = Path(spec)
        if not path.is_file():
            raise CliInputError(f"sigma file not found: {spec}")
        return sigma_from_dict(json.loads(path.read_text()))
    return parse_sigma(spec, nvars)


def _load_seeds(spec: str) -> List[List[float]]:
    text = Path(spec).read_text() if spec.endswith(".json") else spec
    data = json.loads(text)
    if not isinstance(data, list) or not data:
        raise CliInputError("seeds must be a nonempty JSON list of points")
    seeds = [[float(v) for v in row] for row in data]
    return seeds


def _parse_point(text: str) -> List[Fraction]:
    try:
        return [Fraction(tok.strip()) for tok in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise CliInputError(f"bad point {text!r}: {exc}") from None


def _parse_shell_range(text: str) -> Tuple[float, ...]:
    try:
        lo, hi = (int(part) for part in text.split(":"))
    except ValueError:
        raise CliInputError(f"shells must look like 3:12, got {text!r}") from None
    if not 0 < lo <= hi:
        raise CliInputError(f"bad shell range {text!r}")
    return tuple(2.0**-k for k in range(lo, hi + 1))


def _status_exit(verdict: Verdict) -> int:
    if verdict.status == HOLDS:
        return EXIT_OK
    if verdict.status == FAILS:
        return EXIT_MISMATCH
    return EXIT_INCONCLUSIVE


def _exact(value):
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator}
    return value


# -- subcommands ---------------------------------------------------------------


def _cmd_measure(args) -> Tuple[int, dict]:
    fm = _load_map(args.map)
    if args.ratio_scan:
        sigma = _load_sigma(args.sigma, fm.nvars) if args.sigma else SigmaSet.origin(fm.nvars)
        result = km_tm_ratio_scan(
            fm, args.m, _parse_shell_range(args.shells), args.samples, args.seed, sigma
        )
        payload = {
            "command": "measure",
            "mode": "ratio-scan",
            "m": result.m,
            "seed": result.seed,
            "records": [
                {
                    "shell": s.eps,
                    "min_ratio": float(s.min_ratio),
                    "max_ratio": float(s.max_ratio),
                    "argmin": list(s.argmin),
                    "argmax": list(s.argmax),
                    "skipped": s.skipped,
                }
                for s in result.shells
            ],
            "global_min": float(result.global_min()),
            "global_max": float(result.global_max()),
        }
        return EXIT_OK, payload
    if not args.point:
        raise CliInputError("measure needs --point (or --ratio-scan)")
    point = _parse_point(args.point)
    if len(point) != fm.nvars:
        raise CliInputError(f"point has {len(point)} coordinates, map has {fm.nvars}")
    report = measure_report(fm, point)
    values = {}
    for token in args.what.split(","):
        name = token.strip()
        if name == "kappa":
            values[name] = report.kappa
        elif name == "nu":
            values[name] = report.nu
        elif name == "eta":
            values[name] = report.eta
        elif name in ("eta-tilde", "eta_tilde"):
            values[name] = report.eta_tilde
        elif name and name[0] in "KT" and name[1:].isdigit():
            m = int(name[1:])
            fn = kuo_quantity if name[0] == "K" else thom_quantity
            value = fn(fm, point, m)
            values[name] = float(value)
            if isinstance(value, Fraction):
                values[name + "_exact"] = _exact(value)
        else:
            raise CliInputError(f"unknown measure {name!r}")
    payload = {
        "command": "measure",
        "map": map_to_text(fm),
        "point": [str(v) for v in point],
        "p": report.p,
        "n": report.n,
        "values": values,
        "seed": args.seed,
    }
    return EXIT_OK, payload


_CHECKS = {
    "kk": check_kuiper_kuo,
    "kk-delta": check_second_kuiper_kuo,
    "ktilde": check_ktilde,
    "ktilde-delta": check_ktilde_delta,
}


def _cmd_check(args) -> Tuple[int, dict]:
    fm = _load_map(args.map)
    sigma = _load_sigma(args.sigma, fm.nvars)
    cfg = CheckConfig().seeded(args.seed)
    cond = args.condition
    if cond in _CHECKS or cond == "kuo":
        if args.r is None:
            raise CliInputError(f"--condition {cond} needs --r")
        if cond == "kuo":
            verdict = check_kuo_horn(fm, sigma, args.r, Fraction(args.w), cfg)
        else:
            verdict = _CHECKS[cond](fm, sigma, args.r, cfg)
    elif cond == "thom":
        if args.a is None:
            raise CliInputError("--condition thom needs --a")
        verdict = thom_check(fm, sigma, args.a, cfg)
    elif cond == "elliptic":
        verdict = ellipticity_check(fm.components, sigma, cfg)
    else:  # pragma: no cover - argparse restricts choices
        raise CliInputError(f"unknown condition {cond!r}")
    payload = {
        "command": "check",
        "map": map_to_text(fm),
        "sigma": sigma_to_text(sigma),
        "r": args.r,
        "seed": args.seed,
        "verdict": verdict.to_dict(),
    }
    return _status_exit(verdict), payload


def _cmd_arc_scan(args) -> Tuple[int, dict]:
    fm = _load_map(args.map)
    sigma = _load_sigma(args.sigma, fm.nvars)
    cfg = ScanConfig(
        max_exponent=args.max_exp, terms_per_component=args.terms, seed=args.seed
    )
    verdict = arc_scan(fm, sigma, args.r, args.condition, cfg)
    payload = {
        "command": "arc-scan",
        "map": map_to_text(fm),
        "sigma": sigma_to_text(sigma),
        "r": args.r,
        "seed": args.seed,
        "verdict": verdict.to_dict(),
    }
    return _status_exit(verdict), payload


_TARGETS = {
    "kappa": lambda fm, sigma: KappaTarget(fm),
    "norm": lambda fm, sigma: MapNormTarget(fm),
    "combined": lambda fm, sigma: CombinedTarget(fm, sigma),
}


def _cmd_loja(args) -> Tuple[int, dict]:
    fm = _load_map(args.map)
    sigma = _load_sigma(args.sigma, fm.nvars)
    cfg = LojaConfig(
        shells=_parse_shell_range(args.shells),
        samples_per_shell=args.samples,
        seed=args.seed,
    )
    fit = loja_exponent(_TARGETS[args.target](fm, sigma), sigma, cfg)
    payload = {
        "command": "loja",
        "map": map_to_text(fm),
        "sigma": sigma_to_text(sigma),
        "seed": args.seed,
        "fit": fit.to_dict(),
    }
    return (EXIT_OK if fit.usable() else EXIT_INCONCLUSIVE), payload


def _cmd_flow(args) -> Tuple[int, dict]:
    fm = _load_map(args.f)
    gm = _load_map(args.g, fm.nvars)
    sigma = _load_sigma(args.sigma, fm.nvars)
    config = replace(FlowConfig(), tol=args.tol)
    problem = FlowProblem(fm, gm, sigma, args.r, config)
    seeds = _load_seeds(args.seeds)
    trajectories = [integrate(problem, seed, args.t0, args.t1) for seed in seeds]
    payload = {
        "command": "flow",
        "f": map_to_text(fm),
        "g": map_to_text(gm),
        "sigma": sigma_to_text(sigma),
        "r": args.r,
        "tol": args.tol,
        "seed": args.seed,
        "trajectories": [t.to_dict() for t in trajectories],
    }
    bad = {"degenerate", "step-underflow"}
    code = EXIT_INCONCLUSIVE if any(t.status in bad for t in trajectories) else EXIT_OK
    return code, payload


def _cmd_corpus(args) -> Tuple[int, dict]:
    entries = load_corpus(args.path)
    result = run_corpus(entries, filter=args.filter, seed=args.seed, jobs=args.jobs)
    if not args.json:
        print(result.table_text())
    return result.exit_code, result.to_dict()


_HANDLERS = {
    "measure": _cmd_measure,
    "check": _cmd_check,
    "arc-scan": _cmd_arc_scan,
    "loja": _cmd_loja,
    "flow": _cmd_flow,
    "corpus": _cmd_corpus,
}


# -- wiring --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every sampler")
    common.add_argument("--json", action="store_true", help="print the canonical JSON report")
    common.add_argument(
        "--emit-plot-data",
        metavar="BASE",
        help="write (log eps, log min) CSV tables and rendered PNG figures with this path prefix",
    )

    parser = argparse.ArgumentParser(prog="jetlab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", parents=[common], help="matrix measures and jet quantities")
    p.add_argument("--map", required=True)
    p.add_argument("--point", help='comma-separated rationals, e.g. "1,1/2"')
    p.add_argument("--what", default="kappa,nu,eta,K2,T2")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--ratio-scan", action="store_true", help="scan K_m/T_m over shells")
    p.add_argument("--sigma", help="shell center for --ratio-scan (default origin)")
    p.add_argument("--shells", default="3:10")
    p.add_argument("--samples", type=int, default=500)

    p = sub.add_parser("check", parents=[common], help="sufficiency condition checkers")
    p.add_argument("--map", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--r", type=int)
    p.add_argument(
        "--condition",
        required=True,
        choices=["kk", "kk-delta", "kuo", "ktilde", "ktilde-delta", "thom", "elliptic"],
    )
    p.add_argument("--w", default="1", help="horn width for --condition kuo")
    p.add_argument("--a", type=float, help="target exponent for --condition thom")
    p.add_argument("--out", help="write the JSON report here")

    p = sub.add_parser("arc-scan", parents=[common], help="exact arc-lattice witness search")
    p.add_argument("--map", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument(
        "--condition",
        required=True,
        choices=["kk", "kk-delta", "ktilde", "ktilde-delta", "kz"],
    )
    p.add_argument("--max-exp", type=int, default=10)
    p.add_argument("--terms", type=int, default=1, choices=[1, 2])
    p.add_argument("--out", help="write the JSON report here")

    p = sub.add_parser("loja", parents=[common], help="shell-ladder exponent estimate")
    p.add_argument("--map", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--target", default="kappa", choices=sorted(_TARGETS))
    p.add_argument("--shells", default="3:12")
    p.add_argument("--samples", type=int, default=320)
    p.add_argument("--out", help="write the JSON report here")

    p = sub.add_parser("flow", parents=[common], help="integrate the deformation field")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--seeds", required=True, help="JSON list of start points, inline or a .json file")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--out", help="write the trajectory JSON here")

    p = sub.add_parser("corpus", parents=[common], help="run the bundled example corpus")
    p.add_argument("--filter", help="only entries whose id contains this substring")
    p.add_argument("--jobs", type=int)
    p.add_argument("--path", help="alternative corpus JSON file")
    p.add_argument("--out", help="write the JSON report here")

    return parser


def _human_lines(payload: dict) -> List[str]:
    command = payload.get("command")
    lines = []
    if command == "measure" and "values" in payload:
        point = ", ".join(payload["point"])
        lines.append(f"measures of {payload['map']} at ({point}):")
        for name, value in payload["values"].items():
            if name.endswith("_exact"):
                if value["den"] != 1:
                    lines[-1] += f"  [= {value['num']}/{value['den']}]"
            else:
                lines.append(f"  {name} = {value:.12g}")
    elif command == "measure":
        lines.append(f"K_{payload['m']}/T_{payload['m']} over shells:")
        for rec in payload["records"]:
            lines.append(
                f"  eps={rec['shell']:.6g}  ratio in [{rec['min_ratio']:.4f}, "
                f"{rec['max_ratio']:.4f}]  skipped={rec['skipped']}"
            )
        lines.append(
            f"  global ratio range [{payload['global_min']:.4f}, {payload['global_max']:.4f}]"
        )
    elif command in ("check", "arc-scan"):
        v = payload["verdict"]
        at_r = f" at r={payload['r']}" if payload.get("r") is not None else ""
        lines.append(f"{v['condition']}{at_r}: {v['status']} ({v['mode']} mode)")
        if v.get("alpha_hat") is not None:
            lines.append(f"  fitted exponent {v['alpha_hat']:.4f}")
        if v.get("delta_estimate") is not None:
            lines.append(f"  delta estimate {_fmt_maybe_frac(v['delta_estimate'])}")
        if v.get("witness") is not None:
            lines.append(f"  witness: {json.dumps(v['witness'])}")
    elif command == "loja":
        fit = payload["fit"]
        if fit["alpha_hat"] is None:
            lines.append(f"{fit['target']}: fit undetermined")
        else:
            lines.append(
                f"{fit['target']}: alpha_hat = {fit['alpha_hat']:.4f}, "
                f"C_hat = {fit['C_hat']:.4g}, r^2 = {fit['r_squared']:.4f}"
            )
    elif command == "flow":
        for k, t in enumerate(payload["trajectories"]):
            samples = t["samples"]
            res = max((s["F_residual"] for s in samples), default=0.0)
            lines.append(
                f"seed {k}: {t['status']}, {len(samples)} samples, max residual {res:.3e}"
            )
    return lines


def _fmt_maybe_frac(value) -> str:
    if isinstance(value, dict):
        return f"{value['num']}/{value['den']}"
    return f"{value:.4f}"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, but 2 means "inconclusive" here;
        # fold usage problems into the input-error code instead
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        code, payload = _HANDLERS[args.command](args)
    except (
        CliInputError,
        ParseError,
        CorpusSchemaError,
        ArcScanError,
        ShellSamplingError,
        ValueError,
        OSError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = canonical_json(payload)
    if args.json:
        sys.stdout.write(text)
    elif args.command != "corpus":
        for line in _human_lines(payload):
            print(line)
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    if args.emit_plot_data:
        _emit_plot_files(args, payload)
    return code


def _emit_plot_files(args, payload) -> None:
    from .verdicts import LojaFit

    base = Path(args.emit_plot_data)
    if payload.get("command") == "flow":
        from .flow import Trajectory

        trajectories = []
        for t in payload["trajectories"]:
            traj = Trajectory()
            for s in t["samples"]:
                traj.append(s["t"], s["x"], s["F_residual"], s["d_sigma"])
            traj.status = t["status"]
            trajectories.append(traj)
        emit_trajectory_files(trajectories, base)
        return
    fits = []
    fit_dicts = payload.get("verdict", {}).get("fits", [])
    if payload.get("command") == "loja":
        fit_dicts = [payload["fit"]]
    for f in fit_dicts:
        fits.append(
            LojaFit(
                target_label=f["target"],
                eps=f["eps"],
                minima=f["minima"],
                argmins=[tuple(a) for a in f["argmins"]],
                alpha_hat=f["alpha_hat"],
                c_hat=f["C_hat"],
                r_squared=f["r_squared"],
                dropped_coarsest=f["dropped_coarsest"],
                degenerate_eps=f["degenerate_eps"],
                seed=f["seed"],
            )
        )
    if fits:
        emit_fit_files(fits, base)


if __name__ == "__main__":
    sys.exit(main())
