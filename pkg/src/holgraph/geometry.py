"""Line-graph intersections, good circles and Cartan exceptional disks.

Everything here works on a univariate ``F`` normalised so that
``M_F(t) <= 1`` and ``M_F(1/t) >= M``.  The radius ``r0(t)`` that governs
the construction is astronomically small (``1e-137`` already for
``F = (z/4)^2``), so levels and moduli are compared as logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from . import constants as K
from . import funcmodel as fm
from . import zeros as Z
from .modulus import disk, log_max, min_modulus_circle

__all__ = [
    "GeometryWitness", "CartanCover", "GoodCircle", "GeometryError",
    "find_center_c", "good_circle", "critical_values", "separation_shift",
    "line_intersections", "cartan_cover", "cartan_cover_cart2",
]

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


class GeometryError(ArithmeticError):
    """A constructive step failed; the payload would contradict a theorem."""

    def __init__(self, message: str, **payload):
        super().__init__(message)
        self.payload = payload


@dataclass
class GoodCircle:
    level: float
    min_modulus_log: float
    threshold_log: float
    margin_log: float
    levels_scanned: int
    witness: complex = 0j


@dataclass
class GeometryWitness:
    c: complex
    y: complex
    s: float
    c_ys: complex
    circle_level: float
    intersection_points: list
    min_pairwise_distance: float
    N_F: int
    separation_threshold: float
    lambda_t: float
    log_r0: float
    critical_values: list = field(default_factory=list)
    residuals_rel: list = field(default_factory=list)
    critical_point_count: int = 0
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class CartanCover:
    disks: list
    k: int
    radius_sum: float
    radius_cap: float
    lower_bound_log: float
    min_sampled_log: float
    samples_checked: int
    violations: int
    zero_count: int
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


# ---------------------------------------------------------------- centre c

def find_center_c(F: fm.Expr, t: float) -> tuple[complex, int, list]:
    """``c`` with ``n_{F - c}(1/sqrt t) = N_F(t)``, plus ``N_F(t)`` and alternatives.

    The valency search reports shifts ``u`` with ``n_{F + u}`` maximal;
    the centre is ``c = -u``, preferring the smallest ``|c|``.
    """
    t = K._check_t(t)
    vd = Z.valency(F, disk(1.0 / math.sqrt(t)))
    alts = sorted({complex(-u) for u, n in vd.alternatives if n == vd.valency}, key=abs)
    return complex(-vd.witness_c), int(vd.valency), alts


# ------------------------------------------------------------ good circle

def good_circle(F_c: fm.Expr, t: float, M: float, levels: int = 64) -> GoodCircle:
    """First level ``l in [1/sqrt t, 1]`` with ``min_{|z|=l} |F_c| >= 2 r0(t)``."""
    t = K._check_t(t)
    thr = math.log(2.0) + K.log_r0(t, M)
    grid = np.linspace(1.0 / math.sqrt(t), 1.0, levels)
    best = None
    for i, l in enumerate(grid):
        mm = min_modulus_circle(F_c, float(l))
        margin = mm.log_value - thr
        if best is None or margin > best[2]:
            best = (float(l), mm, margin)
        if margin >= 0:
            return GoodCircle(float(l), float(mm.log_value), thr, float(margin), i + 1,
                              complex(mm.witness[0]))
    lo = max(grid[0], best[0] - (grid[1] - grid[0]))
    hi = min(grid[-1], best[0] + (grid[1] - grid[0]))
    res = optimize.minimize_scalar(lambda l: -min_modulus_circle(F_c, float(l)).log_value,
                                   bounds=(lo, hi), method="bounded")
    margin = float(-res.fun) - thr
    raise GeometryError("no good circle at grid resolution", best_level=float(res.x),
                        best_margin=max(margin, best[2]))


# ------------------------------------------------------- critical values

def critical_values(F_c: fm.Expr, radius: float = 1.0) -> tuple[list, list]:
    """Critical points of ``F_c`` in ``D_radius`` (with multiplicity) and their values."""
    dF = fm.diff(F_c, 0)
    if fm.is_structurally_zero(dF):
        return [], []
    pts = Z.locate_zeros(dF, disk(radius))
    vals = [complex(fm.evaluate(F_c, z)) for z, _ in pts]
    return pts, vals


def separation_shift(y: complex, s: float, crit_vals: list, lam: float) -> complex:
    """``c_ys`` with ``|c_ys| < s`` and ``dist(y + c_ys, crit_vals) > s / sqrt(lam)``.

    Candidates follow a Vogel spiral outward from 0 whose spacing is about
    ``s / (4 sqrt lam)``, so the smallest admissible shift is found first.
    """
    sep = s / math.sqrt(lam)
    if not crit_vals:
        return 0j
    C = np.asarray(crit_vals, dtype=complex)
    n = int(math.ceil(16.0 * lam)) + 16
    k = np.arange(n)
    cand = s * np.sqrt(k / n) * np.exp(1j * GOLDEN_ANGLE * k)
    d = np.min(np.abs((y + cand)[:, None] - C[None, :]), axis=1)
    ok = np.flatnonzero(d > sep)
    if ok.size == 0:
        raise GeometryError("separation search exhausted the spiral grid",
                            y=complex(y), s=s, best=float(d.max()))
    return complex(cand[ok[0]])


# ------------------------------------------------------- intersections

def _pairwise_min(pts: list) -> float:
    if len(pts) < 2:
        return math.inf
    P = np.asarray(pts, dtype=complex)
    D = np.abs(P[:, None] - P[None, :])
    return float(D[np.triu_indices(len(pts), 1)].min())


def line_intersections(F: fm.Expr, t: float, y: complex, s: float, M: float | None = None,
                       c: complex | None = None) -> GeometryWitness:
    """Zeros of ``F - c - y - c_ys`` in the unit disk with their separation.

    ``M`` defaults to ``M_F(1/t)``.  Raises :class:`GeometryError` if fewer
    than ``N_F(t)`` separated zeros are found.
    """
    t = K._check_t(t)
    if M is None:
        M = math.exp(log_max(F, 1.0 / t))
    lr0 = K.log_r0(t, M)
    lam = K.lambda_t(t, M)
    rel = 1e-12
    if abs(y) > 0 and math.log(abs(y)) > lr0 + rel:
        raise K.ParameterRangeError(f"|y| = {abs(y)!r} exceeds r0(t)")
    if not s > 0 or math.log(s) > lr0 - math.log(3.0) + rel:
        raise K.ParameterRangeError(f"s = {s!r} violates 0 < s ≤ r0(t)/3")
    c0, N, alts = find_center_c(F, t)
    if c is None:
        c = c0
    F_c = F - c
    gc = good_circle(F_c, t, M)
    crit, cvals = critical_values(F_c, 1.0)
    c_ys = separation_shift(complex(y), s, cvals, lam)
    a = complex(y) + c_ys
    h = F_c - a
    roots = Z.locate_zeros(h, disk(1.0))
    pts = [complex(z) for z, m in roots for _ in range(m)]
    scale = max(abs(a), abs(c), 1e-300)
    resid = [float(abs(fm.evaluate(h, z))) / scale for z in pts]
    sep = s * (t - 1.0) / math.sqrt(lam)
    dmin = _pairwise_min(pts)
    w = GeometryWitness(c=complex(c), y=complex(y), s=float(s), c_ys=c_ys,
                        circle_level=gc.level, intersection_points=pts,
                        min_pairwise_distance=dmin, N_F=N, separation_threshold=sep,
                        lambda_t=lam, log_r0=lr0, critical_values=cvals, residuals_rel=resid,
                        critical_point_count=int(sum(m for _, m in crit)))
    if alts:
        w.notes.append({"alternative_c": alts[:5]})
    if any(m > 1 for _, m in roots):
        raise GeometryError("intersection is not transversal", roots=roots)
    if len(pts) < N or not dmin > sep:
        raise GeometryError("too few separated intersection points", witness=w)
    return w


# ------------------------------------------------------------ Cartan cover

def _cover_samples(radius: float, n: int) -> np.ndarray:
    h = qmc.Halton(d=2, scramble=False).random(n + 1)[1:]
    inner = radius * np.sqrt(h[:, 0]) * np.exp(2j * np.pi * h[:, 1])
    m = max(64, n // 8)
    rim = radius * (1 - 1e-12) * np.exp(2j * np.pi * np.arange(m) / m)
    return np.concatenate([inner, rim])


def _build_cover(h, R: float, beta: float, cap_sum: float, d_exp: float):
    zs = Z.locate_zeros(h, disk(beta * R)) if not fm.is_structurally_constant(h) else []
    k = len(zs)
    if k == 0:
        return [], 0, 0
    # k equal radii with k * rho**d = 0.9 * cap, cap being the bound on sum r_j**d
    rho = (0.9 * cap_sum / k) ** (1.0 / d_exp)
    return [(complex(z), float(rho)) for z, _ in zs], k, int(sum(m for _, m in zs))


def _verify(h, disks, radius: float, bound_log: float, samples: int, tol: float = 1e-9):
    pts = _cover_samples(radius, samples)
    keep = np.ones(pts.size, dtype=bool)
    for z, rho in disks:
        keep &= np.abs(pts - z) >= rho
    pts = pts[keep]
    vals = np.asarray(fm.log_abs(h, pts), dtype=float)
    bad = vals < bound_log - tol * max(1.0, abs(bound_log))
    return pts, vals, bad


def cartan_cover(h: fm.Expr, R: float, alpha: float, beta: float, H: float,
                 d_exp: float = 1.0, samples: int = 4096) -> CartanCover:
    """Exceptional disks and a sampled check of the first Cartan lower bound.

    Disks sit at the distinct zeros of ``h`` in ``D_{beta R}`` with equal
    radii whose ``d_exp``-th powers sum to 90% of ``(2 H R)^d / d``.  The
    bound is checked on ``D_{alpha R}`` minus the disks; a violation raises
    :class:`GeometryError` with the offending point.
    """
    if not 0 < alpha < beta < 1:
        raise K.ParameterRangeError("need 0 < alpha < beta < 1")
    if not 0 < H <= beta * math.e * (1 + 1e-12):
        raise K.ParameterRangeError(f"H = {H!r} violates 0<H≤βe")
    if d_exp <= 0:
        raise K.ParameterRangeError("d must be positive")
    mb = log_max(h, beta * R)
    ma = log_max(h, alpha * R)
    if mb == -math.inf:
        raise ValueError("h vanishes identically")
    cap = (2 * H * R) ** d_exp / d_exp
    disks, k, nz = _build_cover(h, R, beta, cap, d_exp)
    harnack = ((beta + alpha) / (beta - alpha)) ** 2
    bound = mb + harnack * (ma - mb) + nz * math.log(H / (beta * math.e))
    pts, vals, bad = _verify(h, disks, alpha * R, bound, samples)
    cov = CartanCover(disks=disks, k=k, radius_sum=float(sum(r ** d_exp for _, r in disks)),
                      radius_cap=cap, lower_bound_log=bound,
                      min_sampled_log=float(vals.min()) if vals.size else math.inf,
                      samples_checked=int(pts.size), violations=int(bad.sum()), zero_count=nz,
                      params={"R": R, "alpha": alpha, "beta": beta, "H": H, "d": d_exp})
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise GeometryError("Cartan lower bound violated", point=complex(pts[i]),
                            value=float(vals[i]), bound=bound, cover=cov)
    return cov


def cartan_cover_cart2(f: fm.Expr, r: float, t: float, H: float,
                       samples: int = 4096) -> CartanCover:
    """The ``R = t r``, ``beta = 1/sqrt t``, ``alpha = 1/t`` specialisation.

    Verifies ``|f| >= M_f(sqrt t r) (M_f(r) / M_f(t r))^{c(H)}`` off the disks,
    the radius cap ``sum r_j <= 2 H t r`` and the zero-count cap.
    """
    t = K._check_t(t)
    cH = K.c_H(t, H)
    R = t * r
    m_rt, m_r, m_tr = log_max(f, math.sqrt(t) * r), log_max(f, r), log_max(f, t * r)
    if m_tr == -math.inf:
        raise ValueError("f vanishes identically")
    cap = 2 * H * t * r
    disks, k, nz = _build_cover(f, R, 1.0 / math.sqrt(t), cap, 1.0)
    bound = m_rt + cH * (m_r - m_tr)
    pts, vals, bad = _verify(f, disks, r, bound, samples)
    zcap = 9 * (math.sqrt(t) + 1) ** 2 * (m_tr - m_rt) / (t - 1) ** 2
    cov = CartanCover(disks=disks, k=k, radius_sum=float(sum(rr for _, rr in disks)),
                      radius_cap=cap, lower_bound_log=bound,
                      min_sampled_log=float(vals.min()) if vals.size else math.inf,
                      samples_checked=int(pts.size), violations=int(bad.sum()), zero_count=nz,
                      params={"r": r, "t": t, "H": H, "c_H": cH, "zero_cap": zcap})
    if nz > zcap + 1e-9:
        raise GeometryError("zero count exceeds its cap", zeros=nz, cap=zcap)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise GeometryError("Cartan lower bound violated", point=complex(pts[i]),
                            value=float(vals[i]), bound=bound, cover=cov)
    return cov
