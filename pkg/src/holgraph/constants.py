"""Closed-form constants of the graph-restriction inequalities.

Every constant used by a certificate is computed here so that a report can
embed exactly the numbers it relied on.  Values that are naturally tiny
(``r0``) are also available as logarithms.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

__all__ = [
    "ConstantsBundle", "ParameterRangeError", "eval_constants",
    "a1", "a2", "c1_t", "c2_t", "kappa", "kappa_branches", "c_H", "gamma",
    "lambda_t", "delta_t", "log_r0", "r0", "k_ts", "c_growth", "alpha_rho",
    "nf_threshold", "C1_EX1", "C2_EX1",
]

E = math.e
PI2 = math.pi ** 2

#: Numerical bounds for the homogeneous example at t = 9
#: (a2 < C1_EX1 and a1 < C2_EX1).
C1_EX1 = 87.0
C2_EX1 = 510.0


class ParameterRangeError(ValueError):
    """A parameter lies outside the range in which a formula is valid."""


def _check_t(t: float) -> float:
    t = float(t)
    if not (1.0 < t <= 9.0) or not math.isfinite(t):
        raise ParameterRangeError(f"t = {t!r} violates 1<t≤9")
    return t


def a1(t: float) -> float:
    t = _check_t(t)
    s = math.sqrt(t)
    return 300.0 * (s + 1.0) * t ** 1.5 / (t - 1.0) ** 2


def a2(t: float) -> float:
    t = _check_t(t)
    s = math.sqrt(t)
    return (36.0 * (s + 1.0) ** 2 + 162.0 * math.log(108.0 * E / (s - 1.0))) / (s - 1.0) ** 4


def c1_t(t: float) -> float:
    t = _check_t(t)
    s = math.sqrt(t)
    return 50.0 * (s + 1.0) / (t - 1.0) ** 2


def c2_t(t: float) -> float:
    t = _check_t(t)
    s = math.sqrt(t)
    return (18.0 * (s + 1.0) ** 2 + 81.0 * math.log(108.0 * E / (s - 1.0))) / (s - 1.0) ** 4


def nf_threshold(t: float) -> float:
    """ln((1+t)/(2 sqrt t)), the factor multiplying N_f in the hypothesis on p."""
    t = float(t)
    return math.log((1.0 + t) / (2.0 * math.sqrt(t)))


def kappa_branches(d: float, t: float) -> dict[str, float]:
    """Values of every Markov-constant branch whose domain contains ``d``.

    Branch domains touch at ``d = ln((1+t)/(2 sqrt t))`` and
    ``d = 1/(e-1)``; at a joint both adjacent values are returned.
    """
    if d < 0:
        raise ParameterRangeError(f"d = {d!r} violates d ≥ 0")
    if t <= 1:
        raise ParameterRangeError(f"t = {t!r} violates t > 1")
    lo = nf_threshold(t)
    hi = 1.0 / (E - 1.0)
    rel = 1e-12
    out: dict[str, float] = {}
    if d >= hi * (1 - rel):
        out["large"] = E / (t ** math.log1p(1.0 / d) - 1.0)
    if d <= lo * (1 + rel) and lo > 0:
        out["small"] = 2.0 * d / (math.sqrt(t) - 1.0)
    if lo * (1 - rel) <= d <= hi * (1 + rel) and lo < hi:
        out["middle"] = math.exp(d) / (t - 1.0)
    return out


def kappa(d: float, t: float) -> float:
    """Markov constant kappa(d; t), following the branch domains literally."""
    if d < 0:
        raise ParameterRangeError(f"d = {d!r} violates d ≥ 0")
    lo = nf_threshold(t)
    if d >= 1.0 / (E - 1.0):
        return E / (t ** math.log1p(1.0 / d) - 1.0)
    if d < lo:
        return 2.0 * d / (math.sqrt(t) - 1.0)
    return math.exp(d) / (t - 1.0)


def c_H(t: float, H: float) -> float:
    t = _check_t(t)
    if not 0 < H <= E / math.sqrt(t) * (1 + 1e-12):
        raise ParameterRangeError(f"H = {H!r} violates 0<H≤e/√t")
    s = math.sqrt(t)
    return ((s + 1.0) ** 4 + 18.0 * (s + 1.0) ** 2 * math.log(E / H)) / (2.0 * (t - 1.0) ** 2)


def gamma(t: float) -> float:
    t = _check_t(t)
    s = math.sqrt(t)
    return ((s + 1.0) ** 4 + 18.0 * (s + 1.0) ** 2
            * math.log(4.0 * E * t ** 1.5 / (s - 1.0))) / (2.0 * (t - 1.0) ** 2)


def _check_M(M: float, t: float) -> float:
    if not 0 < M <= t ** -2 * (1 + 1e-12):
        raise ParameterRangeError(f"M = {M!r} violates 0<M≤t⁻²")
    return M


def lambda_t(t: float, M: float) -> float:
    t = _check_t(t)
    _check_M(M, t)
    s = math.sqrt(t)
    return 9.0 * (s + 1.0) ** 2 / (t - 1.0) ** 2 * math.log(2.0 * (s + 1.0) / (M * (t - 1.0) ** 2))


def delta_t(t: float, M: float) -> float:
    t = _check_t(t)
    _check_M(M, t)
    s = math.sqrt(t)
    return 9.0 * (s + 1.0) ** 2 / (2.0 * (t - 1.0) ** 2) * math.log(4.0 * (s + 1.0) / (M * (t - 1.0)))


def log_r0(t: float, M: float) -> float:
    t = _check_t(t)
    _check_M(M, t)
    s = math.sqrt(t)
    return (gamma(t) + 1.0) * math.log(M * (t - 1.0) / (4.0 * (s + 1.0)))


def r0(t: float, M: float) -> float:
    return math.exp(log_r0(t, M))


def k_ts(t: float, s: float) -> float:
    """k(t, s) = ln(8 e^{pi^2} s sqrt(t) / (sqrt(t) - 1)^2)."""
    if t <= 1 or s < t:
        raise ParameterRangeError(f"(t, s) = ({t!r}, {s!r}) violates 1<t≤s")
    rt = math.sqrt(t)
    return math.log(8.0 * s * rt / (rt - 1.0) ** 2) + PI2


def c_growth(t: float, log_M1: float, log_M2: float) -> float:
    """c(M1, M2, t) = a2(t) ln(a1(t) M2 / M1), from logarithms of M1, M2."""
    return a2(t) * (math.log(a1(t)) + log_M2 - log_M1)


def alpha_rho(rho: float) -> float:
    if rho <= 0:
        raise ParameterRangeError(f"rho = {rho!r} violates rho > 0")
    return min(1.0, math.log1p(1.0 / rho))


@dataclass
class ConstantsBundle:
    """Constants evaluated at one parameter point; unrequested ones stay None."""

    t: float
    a1_bound: float
    a2_bound: float
    c1_t: float
    c2_t: float
    c1_ex1: float = C1_EX1
    c2_ex1: float = C2_EX1
    nf_threshold: float = 0.0
    gamma_t: float = 0.0
    kappa: float | None = None
    kappa_joint_values: dict | None = None
    cH: float | None = None
    lambda_t: float | None = None
    delta_t: float | None = None
    r0_t: float | None = None
    log_r0_t: float | None = None
    k_ts: float | None = None
    c_M1M2_t: float | None = None
    alpha_rho: float | None = None
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def eval_constants(t: float, *, d: float | None = None, H: float | None = None,
                   s: float | None = None, M: float | None = None,
                   log_M1: float | None = None, log_M2: float | None = None,
                   rho: float | None = None) -> ConstantsBundle:
    """Evaluate every constant that the given parameters determine."""
    t = _check_t(t)
    b = ConstantsBundle(t=t, a1_bound=a1(t), a2_bound=a2(t), c1_t=c1_t(t), c2_t=c2_t(t),
                        nf_threshold=nf_threshold(t), gamma_t=gamma(t))
    inputs = {}
    if d is not None:
        inputs["d"] = d
        b.kappa = kappa(d, t)
        branches = kappa_branches(d, t)
        if len(branches) > 1:
            b.kappa_joint_values = branches
    if H is not None:
        inputs["H"] = H
        b.cH = c_H(t, H)
    if s is not None:
        inputs["s"] = s
        b.k_ts = k_ts(t, s)
    if M is not None:
        inputs["M"] = M
        b.lambda_t = lambda_t(t, M)
        b.delta_t = delta_t(t, M)
        b.log_r0_t = log_r0(t, M)
        b.r0_t = math.exp(b.log_r0_t)
    if log_M1 is not None and log_M2 is not None:
        inputs["log_M1"], inputs["log_M2"] = log_M1, log_M2
        b.c_M1M2_t = c_growth(t, log_M1, log_M2)
    if rho is not None:
        inputs["rho"] = rho
        b.alpha_rho = alpha_rho(rho)
    b.inputs = inputs
    return b
