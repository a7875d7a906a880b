"""Maximum-modulus computations and the Hadamard three-circle toolkit.

All moduli are carried as natural logarithms.  By the maximum principle the
supremum over a disk or ball is searched on its boundary: a coarse
deterministic grid followed by local refinement of the best candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, stats
from scipy.stats import qmc

from . import funcmodel as fm
from .reports import CertReport, make_report

__all__ = [
    "Region", "LogModulus", "DegenerateFunctionError", "disk", "ball",
    "max_modulus", "max_modulus_product", "min_modulus_circle", "log_max",
    "three_circle_check", "growth_ratio", "is_identically_zero", "sphere_directions",
]

_KINDS = ("disk", "ball", "circle", "sphere")


class DegenerateFunctionError(ValueError):
    """The function vanishes identically where a positive modulus is needed."""


@dataclass(frozen=True)
class Region:
    """Disk/ball (or its boundary circle/sphere) in C^n."""

    kind: str
    center: tuple
    radius: float

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"region kind must be one of {_KINDS}")
        r = float(self.radius)
        if not (r > 0 and math.isfinite(r)):
            raise ValueError(f"radius must be positive and finite, got {self.radius!r}")
        c = tuple(complex(x) for x in np.atleast_1d(np.asarray(self.center, dtype=complex)))
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return len(self.center)


def disk(radius: float, center: complex = 0j) -> Region:
    return Region("disk", (center,), radius)


def ball(radius: float, center: Sequence[complex] | None = None, n: int | None = None) -> Region:
    if center is None:
        if n is None:
            raise ValueError("give a center or a dimension")
        center = (0j,) * n
    return Region("ball", tuple(center), radius)


@dataclass
class LogModulus:
    log_value: float
    witness: tuple
    lower_bracket: float
    upper_bracket: float
    samples_used: int
    converged: bool = True
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"log_value": self.log_value, "witness": list(self.witness),
                "lower_bracket": self.lower_bracket, "upper_bracket": self.upper_bracket,
                "samples_used": self.samples_used, "converged": self.converged,
                "flags": list(self.flags)}


# ------------------------------------------------------------------ helpers

def _logabs_fn(f, dim: int) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(f, fm.Expr):
        if f.nvars != dim:
            raise fm.ArityError(f"function has {f.nvars} variables, region has {dim}")
        return lambda pts: np.asarray(fm.log_abs(f, pts), dtype=float)

    def fn(pts):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(np.asarray(f(pts))))
    return fn


def sphere_directions(nreal: int, count: int) -> np.ndarray:
    """Deterministic low-discrepancy unit vectors in R^nreal."""
    h = qmc.Halton(d=nreal, scramble=False).random(count + 1)[1:]
    g = stats.norm.ppf(np.clip(h, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def is_identically_zero(f, region: Region) -> bool:
    """Structural check, then a 16-point probe inside the region."""
    if isinstance(f, fm.Expr) and fm.is_structurally_zero(f):
        return True
    n = region.dim
    h = qmc.Halton(d=2 * n, scramble=False).random(17)[1:]
    x = 2.0 * h - 1.0
    pts = np.asarray(region.center)[None, :] + 0.9 * region.radius * (
        x[:, :n] + 1j * x[:, n:]) / math.sqrt(2 * n)
    vals = _logabs_fn(f, n)(pts)
    return bool(np.all(vals == -np.inf))


def _golden_refine(fn1d, lo, hi):
    res = optimize.minimize_scalar(fn1d, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12, "maxiter": 500})
    return float(res.x), float(res.fun)


def _circle_search(fn, center: complex, radius: float, tol: float, n_grid: int = 512,
                   n_refine: int = 8, sign: float = 1.0) -> LogModulus:
    theta = 2.0 * np.pi * np.arange(n_grid) / n_grid

    def at(th):
        th = np.atleast_1d(th)
        return sign * fn((center + radius * np.exp(1j * th)).reshape(-1, 1))

    v = at(theta)
    used = n_grid
    if np.all(v == -np.inf):
        w = (complex(center + radius),)
        return LogModulus(-np.inf * sign, w, -np.inf * sign, -np.inf * sign, used)
    if sign < 0 and np.any(v == np.inf):
        i = int(np.argmax(v))
        w = (complex(center + radius * np.exp(1j * theta[i])),)
        return LogModulus(-np.inf, w, -np.inf, -np.inf, used, flags=["zero on circle"])
    finite = np.where(np.isfinite(v), v, -np.inf)
    if np.all(np.isfinite(v)) and np.ptp(v) <= 1e-13 * max(1.0, abs(float(v.max()))):
        # |f| is constant on the circle to rounding (monomials, rotations)
        i = int(np.argmax(v))
        val = sign * float(v[i])
        err = 4e-16 * max(1.0, abs(val)) + float(np.ptp(v))
        w = (complex(center + radius * np.exp(1j * theta[i])),)
        lo, hi = (val, val + err) if sign > 0 else (val - err, val)
        return LogModulus(val, w, lo, hi, used, converged=bool(err <= tol))
    is_peak = (finite >= np.roll(finite, 1)) & (finite >= np.roll(finite, -1)) & np.isfinite(v)
    peaks = np.flatnonzero(is_peak)
    if peaks.size == 0:
        peaks = np.array([int(np.argmax(finite))])
    peaks = peaks[np.argsort(-finite[peaks], kind="stable")][:n_refine]
    h = 2.0 * np.pi / n_grid
    best_th, best_v = float(theta[peaks[0]]), float(finite[peaks[0]])
    for i in peaks:
        th, val = _golden_refine(lambda x: -float(at(x)[0]), theta[i] - h, theta[i] + h)
        used += 1
        if -val > best_v:
            best_th, best_v = th, -val
    i0 = int(np.argmin(np.abs(np.angle(np.exp(1j * (theta - best_th))))))
    curv = abs(finite[(i0 - 1) % n_grid] - 2 * finite[i0] + finite[(i0 + 1) % n_grid]) / h ** 2
    if not math.isfinite(curv):
        curv = 0.0
    err = 0.5 * curv * 1e-24 + 4e-16 * max(1.0, abs(best_v))
    w = (complex(center + radius * np.exp(1j * best_th)),)
    val = sign * best_v
    lo, hi = (val, val + err) if sign > 0 else (val - err, val)
    return LogModulus(float(val), w, float(lo), float(hi), used, converged=bool(err <= tol))


def _blocks_point(x: np.ndarray, blocks: Sequence[Region]) -> np.ndarray:
    """Map real vectors (N, D) to points on a product of spheres."""
    out = []
    k = 0
    for b in blocks:
        m = b.dim
        seg = x[:, k:k + 2 * m]
        seg = seg / np.linalg.norm(seg, axis=1, keepdims=True)
        out.append(np.asarray(b.center)[None, :] + b.radius * (seg[:, :m] + 1j * seg[:, m:]))
        k += 2 * m
    return np.hstack(out)


def _distinct_seeds(x: np.ndarray, ranked: np.ndarray, k: int, sep: float = 0.25) -> list:
    u = x / np.linalg.norm(x, axis=1, keepdims=True)
    picked: list = []
    for i in ranked:
        if all(np.linalg.norm(u[i] - u[j]) > sep for j in picked):
            picked.append(int(i))
            if len(picked) == k:
                break
    return picked


def _product_search(fn, blocks: Sequence[Region], tol: float, n_samples: int,
                    n_refine: int = 4) -> LogModulus:
    D = sum(2 * b.dim for b in blocks)
    x0 = _product_directions(blocks, n_samples)
    v = fn(_blocks_point(x0, blocks))
    used = n_samples
    if np.all(v == -np.inf):
        w = tuple(complex(c) for c in _blocks_point(x0[:1], blocks)[0])
        return LogModulus(-np.inf, w, -np.inf, -np.inf, used)
    finite = np.where(np.isfinite(v), v, -np.inf)
    order = _distinct_seeds(x0, np.argsort(-finite, kind="stable")[:16 * n_refine], n_refine)
    best_x, best_v, best_err = x0[order[0]], float(finite[order[0]]), 0.0

    def obj(x):
        val = fn(_blocks_point(x[None, :], blocks))[0]
        return -val if np.isfinite(val) else 1e300

    for i in order:
        res = optimize.minimize(obj, x0[i], method="Nelder-Mead",
                                options={"xatol": 1e-11, "fatol": 1e-14,
                                         "maxiter": 400 * D, "maxfev": 800 * D})
        used += int(res.nfev)
        if -res.fun > best_v:
            fs = res.final_simplex[1]
            best_x, best_v, best_err = res.x, float(-res.fun), float(np.max(fs) - np.min(fs))
    err = best_err + 4e-16 * max(1.0, abs(best_v))
    w = tuple(complex(c) for c in _blocks_point(best_x[None, :], blocks)[0])
    return LogModulus(best_v, w, best_v, float(best_v + err), used, converged=bool(err <= tol))


def _product_directions(blocks: Sequence[Region], n: int) -> np.ndarray:
    D = sum(2 * b.dim for b in blocks)
    h = qmc.Halton(d=D, scramble=False).random(n + 1)[1:]
    g = stats.norm.ppf(np.clip(h, 1e-12, 1 - 1e-12))
    return g


@lru_cache(maxsize=4096)
def _unit_sphere_max(f, tol: float, samples: int) -> LogModulus:
    fn = _logabs_fn(f, f.nvars)
    return _product_search(fn, [Region("sphere", (0j,) * f.nvars, 1.0)], tol, samples)


# -------------------------------------------------------------- public API

def max_modulus(f, region: Region, tol: float = 1e-9, samples: int | None = None) -> LogModulus:
    """Logarithm of ``sup |f|`` over a closed disk or ball.

    ``f`` is an expression or a callable mapping an ``(N, n)`` array of
    points to complex values.
    """
    n = region.dim
    fn = _logabs_fn(f, n)
    if is_identically_zero(f, region):
        w = tuple(complex(c) for c in np.asarray(region.center) + np.eye(n)[0] * region.radius)
        return LogModulus(-np.inf, w, -np.inf, -np.inf, 16, flags=["identically zero"])
    if n == 1:
        return _circle_search(fn, region.center[0], region.radius, tol, samples or 512)
    if (isinstance(f, fm.Poly) and f.is_homogeneous and not any(region.center)):
        d = f.degree
        unit = _unit_sphere_max(f, tol, samples or 4096)
        shift = d * math.log(region.radius)
        w = tuple(complex(c) for c in region.radius * np.asarray(unit.witness))
        return LogModulus(unit.log_value + shift, w, unit.lower_bracket + shift,
                          unit.upper_bracket + shift, unit.samples_used, unit.converged,
                          ["homogeneous reduction"])
    return _product_search(fn, [region], tol, samples or 4096)


def max_modulus_product(f, blocks: Sequence[Region], tol: float = 1e-9,
                        samples: int | None = None) -> LogModulus:
    """``log sup |f|`` over a product of disks/balls (distinguished boundary search)."""
    n = sum(b.dim for b in blocks)
    fn = _logabs_fn(f, n)
    if len(blocks) == 1:
        return max_modulus(f, blocks[0], tol, samples)
    return _product_search(fn, blocks, tol, samples or 4096)


def min_modulus_circle(f, radius: float, center: complex = 0j, samples: int = 512,
                       tol: float = 1e-9) -> LogModulus:
    """``log min |f|`` over the circle ``|z - center| = radius``."""
    return _circle_search(_logabs_fn(f, 1), complex(center), float(radius), tol, samples, sign=-1.0)


@lru_cache(maxsize=65536)
def _cached_log_max(f, radius: float, center: tuple, tol: float) -> float:
    reg = Region("disk" if len(center) == 1 else "ball", center, radius)
    return max_modulus(f, reg, tol).log_value


def log_max(f, radius: float, center=None, tol: float = 1e-9) -> float:
    """``m_f(r, z0) = ln M_f(r, z0)``; memoized for expressions."""
    n = f.nvars if isinstance(f, fm.Expr) else 1
    c = (0j,) * n if center is None else tuple(
        complex(x) for x in np.atleast_1d(np.asarray(center, dtype=complex)))
    if isinstance(f, fm.Expr):
        return _cached_log_max(f, float(radius), c, float(tol))
    reg = Region("disk" if n == 1 else "ball", c, radius)
    return max_modulus(f, reg, tol).log_value


def growth_ratio(f, r: float, t: float, s: float, tol: float = 1e-9) -> float:
    """``ln R_f(r, t, s) = m_f(r/t) - m_f(r/s)``."""
    if not (1 < t <= s) or r <= 0:
        raise ValueError("need r > 0 and 1 < t <= s")
    inner = log_max(f, r / s, tol=tol)
    if inner == -np.inf:
        raise DegenerateFunctionError("f vanishes identically on the inner disk")
    return log_max(f, r / t, tol=tol) - inner


def three_circle_check(f, z0, r0: float, r1: float, r2: float, tol: float = 1e-9) -> CertReport:
    """Check log-convexity of ``M_f`` at three radii plus its consequences.

    Sub-reports cover: monotonicity of ``m(r) - m(r/e)``; the bound
    ``m(r) - m(1) <= ln r (m(er) - m(r))``; and
    ``m(r2) - m(r2/e) <= (m(r2) - m(r2/t)) / ln t`` for ``1 < t <= e``.
    """
    if not 0 < r0 < r1 < r2:
        raise ValueError("need 0 < r0 < r1 < r2")
    n = f.nvars if isinstance(f, fm.Expr) else 1
    center = (0j,) * n if z0 is None else tuple(np.atleast_1d(np.asarray(z0, dtype=complex)))
    m = lambda r: log_max(f, r, center, tol)  # noqa: E731
    params = {"z0": list(center), "r0": r0, "r1": r1, "r2": r2}
    reg = Region("disk" if n == 1 else "ball", center, r2)
    if is_identically_zero(f, reg):
        return make_report("three_circle", "e22", -np.inf, -np.inf, tol, status="vacuous",
                           params=params, notes=["f is identically zero"])
    theta = math.log(r1 / r0) / math.log(r2 / r0)
    lhs = m(r1)
    rhs = (1 - theta) * m(r0) + theta * m(r2)
    rep = make_report("three_circle", "e22", lhs, rhs, tol, params={**params, "theta": theta})

    subs = []
    e = math.e
    for r in (r0, r1):
        subs.append(make_report("increment_monotone", "e22a", m(r) - m(r / e),
                                m(r2) - m(r2 / e), tol, params={"r": r, "r2": r2}))
    if r2 > e:
        r = min(max(1.0, r1), r2 / e)
        subs.append(make_report("log_growth_bound", "e22b", m(r) - m(1.0),
                                math.log(r) * (m(e * r) - m(r)), tol, params={"r": r, "r2": r2}))
    tt = min(e, r2 / r1)
    if tt > 1:
        subs.append(make_report("increment_ratio", "e22c", m(r2) - m(r2 / e),
                                (m(r2) - m(r2 / tt)) / math.log(tt), tol,
                                params={"t": tt, "r2": r2}))
    rep.sub_reports = subs
    if not all(s.passed for s in subs):
        rep.passed = False
        rep.status = "fail"
    return rep
