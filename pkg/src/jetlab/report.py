"""Report emission: canonical JSON, shell-table CSV, and rendered figures.

JSON output is canonicalized (sorted keys, fixed separators) so that a run
with fixed seed and inputs is byte-identical.  `--emit-plot-data` writes a
(log eps, log min) CSV per fit and renders the matching figure as a PNG next
to it.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from .verdicts import LojaFit, _jsonable


def canonical_json(payload) -> str:
    """Deterministic JSON text: sorted keys, stable separators, newline end."""
    return json.dumps(_jsonable(payload), sort_keys=True, separators=(",", ": "), indent=2) + "\n"


def write_json(payload, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(canonical_json(payload))
    return path


def _slug(label: str) -> str:
    cleaned = re.sub(r"[^a-zA-Z0-9]+", "-", label).strip("-").lower()
    return cleaned or "fit"


def fit_csv_text(fit: LojaFit) -> str:
    """Shell table as CSV, one row per shell in the given order.

    Degenerate shells (exact zero minimum) keep their raw value but leave
    the log column empty so plotting tools skip them.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["eps", "min_value", "log10_eps", "log10_min"])
    for eps, mn in zip(fit.eps, fit.minima):
        log_min = f"{math.log10(mn):.12g}" if mn > 0 else ""
        writer.writerow([f"{eps:.12g}", f"{mn:.12g}", f"{math.log10(eps):.12g}", log_min])
    return buf.getvalue()


def render_fit_png(fit: LojaFit, path: Union[str, Path], title: Optional[str] = None) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.0, 3.75))
    pos = [(e, m) for e, m in zip(fit.eps, fit.minima) if m > 0]
    if pos:
        xs, ys = zip(*pos)
        ax.loglog(xs, ys, "o", ms=5, label="shell minima")
        if fit.usable():
            grid = sorted(xs)
            line = [fit.c_hat * x**fit.alpha_hat for x in grid]
            ax.loglog(
                grid,
                line,
                "-",
                lw=1,
                label=f"fit: alpha = {fit.alpha_hat:.4f}, r2 = {fit.r_squared:.4f}",
            )
    ax.set_xlabel("shell radius eps")
    ax.set_ylabel(f"min {fit.target_label}")
    ax.set_title(title or fit.target_label)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def emit_fit_files(
    fits: Sequence[LojaFit], base: Union[str, Path], render: bool = True
) -> List[Path]:
    """Write `<base>-<slug>.csv` (and `.png`) per fit; returns written paths."""
    base = Path(base)
    written: List[Path] = []
    seen: Dict[str, int] = {}
    for fit in fits:
        slug = _slug(fit.target_label)
        seen[slug] = seen.get(slug, 0) + 1
        if seen[slug] > 1:
            slug = f"{slug}-{seen[slug]}"
        stem = base.parent / f"{base.name}-{slug}"
        csv_path = stem.with_suffix(".csv")
        csv_path.write_text(fit_csv_text(fit))
        written.append(csv_path)
        if render:
            written.append(render_fit_png(fit, stem.with_suffix(".png")))
    return written


def trajectory_csv_text(traj) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "d_sigma", "F_residual"])
    for t, d, res in zip(traj.ts, traj.distances, traj.residuals):
        writer.writerow([f"{t:.12g}", f"{d:.12g}", f"{res:.12g}"])
    return buf.getvalue()


def render_trajectory_png(trajectories, path: Union[str, Path]) -> Path:
    """Distance-to-sigma and first-integral residual curves for each seed."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    fig, (ax_d, ax_r) = plt.subplots(1, 2, figsize=(8.0, 3.5))
    for k, traj in enumerate(trajectories):
        ax_d.plot(traj.ts, traj.distances, lw=1, label=f"seed {k}")
        ax_r.semilogy(
            traj.ts,
            [max(r, 1e-18) for r in traj.residuals],
            lw=1,
        )
    ax_d.set_xlabel("t")
    ax_d.set_ylabel("d(x, sigma)")
    ax_r.set_xlabel("t")
    ax_r.set_ylabel("|F(x,t) - F(x0,t0)|")
    if len(trajectories) <= 8:
        ax_d.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def emit_trajectory_files(
    trajectories, base: Union[str, Path], render: bool = True
) -> List[Path]:
    base = Path(base)
    written: List[Path] = []
    for k, traj in enumerate(trajectories):
        csv_path = base.parent / f"{base.name}-seed{k}.csv"
        csv_path.write_text(trajectory_csv_text(traj))
        written.append(csv_path)
    if render and trajectories:
        written.append(render_trajectory_png(trajectories, base.parent / f"{base.name}.png"))
    return written
