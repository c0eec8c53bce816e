"""Verdict and fit containers shared by the arc and sampling checkers."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

HOLDS = "holds-on-evidence"
FAILS = "fails-with-witness"
INCONCLUSIVE = "inconclusive"


def _jsonable(value):
    from .poly import INFINITE, UNKNOWN

    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        if value == INFINITE:
            return "infinite"
        if value == -INFINITE:
            return "-infinite"
        return value
    if value is UNKNOWN:
        return "unknown"
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator}
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return str(value)


@dataclass
class LojaFit:
    """Power-law fit min_{d(x,sigma)=eps} target(x) ~ C * eps^alpha."""

    target_label: str
    eps: List[float]
    minima: List[float]
    argmins: List[Tuple[float, ...]]
    alpha_hat: Optional[float]
    c_hat: Optional[float]
    r_squared: Optional[float]
    dropped_coarsest: int
    degenerate_eps: List[float] = field(default_factory=list)
    seed: Optional[int] = None

    def usable(self) -> bool:
        return self.alpha_hat is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target": self.target_label,
            "eps": list(self.eps),
            "minima": list(self.minima),
            "argmins": [_jsonable(a) for a in self.argmins],
            "alpha_hat": self.alpha_hat,
            "C_hat": self.c_hat,
            "r_squared": self.r_squared,
            "dropped_coarsest": self.dropped_coarsest,
            "degenerate_eps": list(self.degenerate_eps),
            "seed": self.seed,
        }


@dataclass
class Verdict:
    """Outcome of a condition check, with whatever evidence produced it."""

    condition: str
    r: Optional[int]
    mode: str  # "arc", "sampling" or "combined"
    status: str  # HOLDS / FAILS / INCONCLUSIVE
    witness: Any = None
    witness_profile: Any = None
    alpha_hat: Optional[float] = None
    c_hat: Optional[float] = None
    delta_estimate: Union[Fraction, float, None] = None
    fits: List[LojaFit] = field(default_factory=list)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def holds(self) -> bool:
        return self.status == HOLDS

    def failed(self) -> bool:
        return self.status == FAILS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "condition": self.condition,
            "r": self.r,
            "mode": self.mode,
            "status": self.status,
            "witness": _jsonable(self.witness),
            "witness_profile": _jsonable(self.witness_profile),
            "alpha_hat": self.alpha_hat,
            "C_hat": self.c_hat,
            "delta_estimate": _jsonable(self.delta_estimate),
            "fits": [f.to_dict() for f in self.fits],
            "diagnostics": _jsonable(self.diagnostics),
        }
