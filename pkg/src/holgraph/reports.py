"""Certificate reports shared by every checking routine."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = ["CertReport", "make_report", "jsonable", "STATUSES"]

STATUSES = ("pass", "fail", "hypothesis_not_met", "vacuous", "degenerate", "diagnostic")


def jsonable(x: Any) -> Any:
    """Convert numpy scalars, complex numbers and non-finite floats for JSON."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": jsonable(float(x.real)), "im": jsonable(float(x.imag))}
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if hasattr(x, "to_dict"):
        return jsonable(x.to_dict())
    return x


@dataclass
class CertReport:
    """Outcome of checking one inequality ``lhs <= rhs``.

    ``scale`` is ``"log"`` when both sides are natural logarithms of
    moduli and ``"count"`` when they are zero counts.
    """

    name: str
    paper_tag: str
    lhs_log: float
    rhs_log: float
    margin_log: float
    passed: bool
    status: str
    constants: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    scale: str = "log"
    sub_reports: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return jsonable({
            "name": self.name,
            "paper_tag": self.paper_tag,
            "lhs_log": self.lhs_log,
            "rhs_log": self.rhs_log,
            "margin_log": self.margin_log,
            "pass": self.passed,
            "status": self.status,
            "scale": self.scale,
            "constants": self.constants,
            "params": self.params,
            "witnesses": self.witnesses,
            "notes": self.notes,
            "sub_reports": [r.to_dict() for r in self.sub_reports],
        })

    @property
    def is_conclusive(self) -> bool:
        return self.status in ("pass", "fail")


def _margin(lhs: float, rhs: float) -> float:
    if lhs == -math.inf and rhs == -math.inf:
        return 0.0
    if lhs == math.inf and rhs == math.inf:
        return math.nan
    return rhs - lhs


def make_report(name: str, tag: str, lhs: float, rhs: float, tol: float = 1e-9,
                **kw) -> CertReport:
    """Build a report, deciding pass/fail from ``rhs - lhs >= -tol``."""
    margin = _margin(float(lhs), float(rhs))
    ok = bool(margin >= -tol)
    status = kw.pop("status", None) or ("pass" if ok else "fail")
    return CertReport(name=name, paper_tag=tag, lhs_log=float(lhs), rhs_log=float(rhs),
                      margin_log=margin, passed=ok, status=status, **kw)
