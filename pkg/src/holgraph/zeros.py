"""Zero counting, zero location, valency and Bernstein index on disks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import optimize

from . import constants as K
from . import funcmodel as fm
from .modulus import Region, disk, is_identically_zero, log_max

__all__ = [
    "IDENTICALLY_ZERO", "ZeroData", "ValencyData", "BernsteinIndexData",
    "IndeterminateCountError", "count_zeros", "locate_zeros", "valency",
    "bernstein_index", "vp_zero_bound", "valency_lower_bound", "vanishing_order",
]

#: Zero count of the zero function (the usual ``n_f = -inf`` convention).
IDENTICALLY_ZERO = -math.inf


class IndeterminateCountError(ArithmeticError):
    pass


@dataclass
class ZeroData:
    count: int | float
    disk: Region
    zero_locations: list | None = None
    radius_used: float | None = None
    perturbed: bool = False
    nodes: int = 0
    residual: float = 0.0

    @property
    def identically_zero(self) -> bool:
        return self.count == IDENTICALLY_ZERO


@dataclass
class ValencyData:
    valency: int
    witness_c: complex
    search_budget: int
    alternatives: list = field(default_factory=list)


@dataclass
class BernsteinIndexData:
    value: float
    witness_subdisk: tuple  # (center, radius)


def _as_disk(region) -> Region:
    if isinstance(region, Region):
        if region.dim != 1:
            raise fm.ArityError("zero counting works on univariate disks")
        return region
    return disk(float(region))


def _check_univariate(h):
    if not isinstance(h, fm.Expr) or h.nvars != 1:
        raise fm.ArityError("expected a univariate expression")


# ------------------------------------------------------------ zero counting

def _log_derivative_integral(h, dh, center: complex, radius: float, m: int) -> complex:
    th = 2 * np.pi * np.arange(m) / m
    u = radius * np.exp(1j * th)
    z = center + u
    with np.errstate(all="ignore"):
        ratio = np.exp(fm.clog(dh, z) - fm.clog(h, z))
    return complex(np.mean(ratio * u))


def _winding(h, center, radius, start: int = 1024, max_nodes: int = 1 << 20):
    """Winding number of ``h`` on the circle; arcs are halved until every
    phase step is below ``pi/2``.  ``(None, nodes)`` if a sample hits a zero."""

    def arg(th):
        v = fm.clog(h, center + radius * np.exp(1j * np.asarray(th)))
        return np.asarray(v, dtype=complex)

    th = 2 * np.pi * np.arange(start + 1) / start
    lv = arg(th)
    nodes = start
    total = 0.0
    stack = list(zip(th[:-1], th[1:], lv[:-1], lv[1:]))
    while stack:
        a, b, la, lb = stack.pop()
        if not (np.isfinite(la.real) and np.isfinite(lb.real)):
            return None, nodes
        step = (lb.imag - la.imag + np.pi) % (2 * np.pi) - np.pi
        if abs(step) < np.pi / 2:
            total += step
            continue
        if nodes >= max_nodes or b - a < 1e-15:
            return None, nodes
        m = 0.5 * (a + b)
        lm = arg([m])[0]
        nodes += 1
        stack += [(a, m, la, lm), (m, b, lm, lb)]
    k = total / (2 * np.pi)
    return (int(round(k)), nodes) if abs(k - round(k)) < 1e-6 else (None, nodes)


def _count_once(h, dh, center, radius):
    m = 256
    prev = None
    last = math.nan
    while m <= 1 << 16:
        val = _log_derivative_integral(h, dh, center, radius, m)
        if not np.isfinite(val):
            return None, m, math.inf
        k = round(val.real)
        res = abs(val - k)
        if res < 0.1:
            if prev == k:
                return int(k), m, res
            prev = k
        else:
            prev = None
        last = res
        m *= 2
    if last < 0.25 and prev is not None:
        return int(prev), m // 2, last
    return None, m // 2, last


def count_zeros(h, region, *, _dh=None, _track=True) -> ZeroData:
    """Number of zeros of ``h`` in an open disk, with multiplicity.

    Uses the argument principle with adaptive trapezoidal quadrature.  A
    zero very close to the contour slows the quadrature down; the count is
    then taken from adaptive phase tracking instead.  If that fails too (a
    zero on the contour) the radius is pushed outward by ``1e-6 r``.
    """
    _check_univariate(h)
    d = _as_disk(region)
    if is_identically_zero(h, d):
        return ZeroData(IDENTICALLY_ZERO, d)
    if fm.is_structurally_constant(h):
        return ZeroData(0, d, radius_used=d.radius)
    dh = fm.diff(h, 0) if _dh is None else _dh
    c, r = d.center[0], d.radius
    for attempt in range(4):
        rr = r * (1 + 1e-6 * attempt)
        k, nodes, res = _count_once(h, dh, c, rr)
        if k is None and _track:
            k, nodes = _winding(h, c, rr)
        if k is not None:
            return ZeroData(k, d, radius_used=rr, perturbed=attempt > 0, nodes=nodes,
                            residual=float(res))
    raise IndeterminateCountError(
        f"indeterminate count: quadrature residual {res:.3g} on |z-{c}|={r}")


def vanishing_order(h, scale: float = 1.0) -> int:
    """Order of the zero of ``h`` at 0, counted on a circle of radius 1e-4 * scale."""
    zd = count_zeros(h, disk(1e-4 * scale))
    return 0 if zd.identically_zero else int(zd.count)


# ---------------------------------------------------------- zero location

class _EdgeHit(ArithmeticError):
    pass


def _edge_phase(h, a: complex, b: complex) -> float:
    t = np.linspace(0.0, 1.0, 33)
    span = abs(b - a)
    floor = 1e-13 * max(abs(a), abs(b))
    for _ in range(60):
        z = a + (b - a) * t
        L = fm.clog(h, z)
        if np.any(~np.isfinite(L.real)):
            raise _EdgeHit
        d = np.angle(np.exp(1j * np.diff(L.imag)))
        # a large jump in log|h| signals a nearby zero whose phase swing may alias
        bad = (np.abs(d) > np.pi / 4) | (np.abs(np.diff(L.real)) > 0.5)
        if not bad.any():
            return float(d.sum())
        # below this spacing the samples only resolve rounding noise
        if np.min(np.diff(t)[bad]) * span < floor or t.size > 1 << 14:
            raise _EdgeHit
        t = np.sort(np.concatenate([t, 0.5 * (t[:-1][bad] + t[1:][bad])]))
    raise _EdgeHit


def _rect_count(h, lo: complex, hi: complex) -> int:
    corners = [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag), lo]
    total = sum(_edge_phase(h, corners[i], corners[i + 1]) for i in range(4))
    return int(round(total / (2 * np.pi)))


def _newton(h, dh, z0: complex, mult: int, iters: int = 80) -> complex | None:
    z = complex(z0)
    for _ in range(iters):
        with np.errstate(all="ignore"):
            ratio = complex(np.exp(fm.clog(h, z) - fm.clog(dh, z)))
        if not np.isfinite(ratio):
            if fm.log_abs(h, z) == -np.inf:
                return z
            return None
        step = mult * ratio
        z -= step
        if abs(step) <= 1e-15 * max(abs(z), 1e-300):
            return z
    return z


_SPLITS = (0.5137, 0.4821, 0.5311, 0.4637)

# Relative radii at which a Newton point may claim a whole square's zeros.
# Multiple zeros of an expanded polynomial smear into clusters of size
# about eps**(1/m), hence the looser rungs.
_CLUSTER_RUNGS = (1e-12, 1e-9, 1e-7, 1e-5, 1e-4, 1e-3)


def _cluster_ok(h, dh, z: complex, cnt: int, side: float) -> bool:
    cap = max(1e-12, 50.0 * np.finfo(float).eps ** (1.0 / cnt))
    if fm.log_abs(h, z) == -np.inf and 0.25 * side > 1e-300:
        # Newton landed on an exact zero; its multiplicity is checked on the square
        try:
            if count_zeros(h, disk(0.25 * side, z), _dh=dh, _track=False).count == cnt:
                return True
        except IndeterminateCountError:
            pass
    scale = abs(z) if z != 0 else side
    for rel in (r for r in _CLUSTER_RUNGS if r <= cap):
        rho = max(rel * scale, 1e-300)
        if rho > 0.25 * side:
            break
        try:
            if count_zeros(h, disk(rho, z), _dh=dh, _track=False).count == cnt:
                return True
        except IndeterminateCountError:
            continue
    return False


def _zoom_radius(h, dh, c: complex, r: float, iters: int = 14) -> float:
    """Smallest radius (to a factor of about 1.1) holding every zero of the disk.

    Zeros packed near the centre at scales like 1e-60 would otherwise cost
    hundreds of quadtree levels.
    """
    try:
        n = count_zeros(h, disk(r, c), _dh=dh, _track=False).count
    except IndeterminateCountError:
        return r
    if n <= 0:
        return r
    good, bad = math.log(r), math.log(r) - 230.0
    for _ in range(iters):
        mid = 0.5 * (good + bad)
        try:
            k = count_zeros(h, disk(math.exp(mid), c), _dh=dh, _track=False).count
        except IndeterminateCountError:
            k = -1
        if k == n:
            good = mid
        else:
            bad = mid
        if good - bad < 0.1:
            break
    return min(r, math.exp(good) * 1.5)


def locate_zeros(h, region, max_depth: int = 1200) -> list[tuple[complex, int]]:
    """Zeros of ``h`` in an open disk as ``(location, multiplicity)`` pairs.

    Quadtree subdivision with argument-principle counts on squares, then
    Newton refinement once a square holds a single (possibly multiple) zero.
    """
    _check_univariate(h)
    d = _as_disk(region)
    if is_identically_zero(h, d):
        raise ValueError("the zero function has no isolated zeros")
    dh = fm.diff(h, 0)
    c, r = d.center[0], d.radius
    pad = _zoom_radius(h, dh, c, r) * 1.0173
    lo, hi = c - pad * (1 + 1j), c + pad * (1 + 1j)
    try:
        total = _rect_count(h, lo, hi)
    except _EdgeHit:
        pad *= 1.0131
        lo, hi = c - pad * (1 + 1j), c + pad * (1 + 1j)
        total = _rect_count(h, lo, hi)
    found: list[tuple[complex, int]] = []
    stack = [(lo, hi, total, 0)]
    while stack:
        a, b, cnt, depth = stack.pop()
        if cnt <= 0:
            continue
        mid = 0.5 * (a + b)
        side = abs(b.real - a.real)
        z = _newton(h, dh, mid, cnt)
        if z is not None and abs(z - mid) <= side:
            if _cluster_ok(h, dh, z, cnt, side):
                found.append((z, cnt))
                continue
        if depth >= max_depth or side < 1e-13 * abs(mid):
            found.append((mid, cnt))
            continue
        for frac in _SPLITS:
            xm = a.real + frac * (b.real - a.real)
            ym = a.imag + frac * (b.imag - a.imag)
            kids = [(a, complex(xm, ym)), (complex(xm, a.imag), complex(b.real, ym)),
                    (complex(xm, ym), b), (complex(a.real, ym), complex(xm, b.imag))]
            try:
                counts = [_rect_count(h, p, q) for p, q in kids]
            except _EdgeHit:
                continue
            if sum(counts) == cnt:
                break
        else:
            # Rounding noise can defeat every split of a tiny square; settle
            # for the circumscribed disk when it holds exactly this many zeros.
            try:
                whole = count_zeros(h, disk(side, mid), _dh=dh, _track=False).count
            except IndeterminateCountError:
                whole = -1
            if whole == cnt:
                best = z if z is not None and abs(z - mid) < side else mid
                found.append((best, cnt))
                continue
            raise IndeterminateCountError(f"subdivision failed to isolate zeros near {mid} (side {side:.3g}, count {cnt})")
        for (p, q), k in zip(kids, counts):
            stack.append((p, q, k, depth + 1))
    inside = [(z, m) for z, m in found if abs(z - c) < r]
    inside.sort(key=lambda zm: (abs(zm[0] - c), np.angle(zm[0] - c)))
    return inside


# ----------------------------------------------------------------- valency

def _polygon_winding(P: np.ndarray, U: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Winding numbers of the closed polygon ``P`` about each point of ``U`` (signed ray crossings)."""
    x0, y0 = P.real[:-1], P.imag[:-1]
    x1, y1 = P.real[1:], P.imag[1:]
    dy = np.where(y1 == y0, 1.0, y1 - y0)
    out = np.empty(U.shape[0], dtype=int)
    for lo in range(0, U.shape[0], chunk):
        ux = U[lo:lo + chunk].real[:, None]
        uy = U[lo:lo + chunk].imag[:, None]
        up = (y0 <= uy) & (y1 > uy)
        down = (y0 > uy) & (y1 <= uy)
        xc = x0 + (uy - y0) * (x1 - x0) / dy
        right = xc > ux
        out[lo:lo + chunk] = (up & right).sum(axis=1) - (down & right).sum(axis=1)
    return out


def _grid_winding(P: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Winding numbers on the grid ``gx + i gy`` (row-major in ``gy``), one sweep per row."""
    x0, y0 = P.real[:-1], P.imag[:-1]
    x1, y1 = P.real[1:], P.imag[1:]
    out = np.zeros((gy.size, gx.size), dtype=int)
    for j, y in enumerate(gy):
        up = (y0 <= y) & (y1 > y)
        down = (y0 > y) & (y1 <= y)
        hit = up | down
        if not hit.any():
            continue
        xc = x0[hit] + (y - y0[hit]) * (x1[hit] - x0[hit]) / (y1[hit] - y0[hit])
        sgn = np.where(up[hit], 1, -1)
        order = np.argsort(xc)
        xs, cs = xc[order], np.cumsum(sgn[order][::-1])[::-1]
        k = np.searchsorted(xs, gx, side="right")
        out[j] = np.where(k < xs.size, cs[np.minimum(k, xs.size - 1)], 0)
    return out.ravel()


def _critical_points(h, d: Region) -> list[complex]:
    c, r = d.center[0], d.radius
    if isinstance(h, fm.Poly):
        dc = fm.diff(h, 0).univariate_coeffs()
        if len(dc) <= 1:
            return []
        roots = npoly.polyroots(dc)
        return [complex(z) for z in roots if abs(z - c) < r]
    try:
        return [z for z, _ in locate_zeros(fm.diff(h, 0), d)]
    except (IndeterminateCountError, ValueError):
        return []


def valency(h, region, budget: int = 64) -> ValencyData:
    """Largest number of solutions of ``h = u`` in the disk, over all ``u``.

    Returned with ``witness_c = -u``, i.e. ``n_{h + c}`` attains the value.
    Candidates are polygon-winding estimates on a grid covering the image
    of the boundary circle plus critical values; the winner is confirmed
    by an exact argument-principle count.
    """
    _check_univariate(h)
    d = _as_disk(region)
    if fm.is_structurally_constant(h):
        raise ValueError("valency undefined for constants")
    c, r = d.center[0], d.radius
    nb = 4096
    th = 2 * np.pi * np.arange(nb + 1) / nb
    P = np.asarray(fm.evaluate(h, c + r * np.exp(1j * th)))
    if np.ptp(P.real) == 0 and np.ptp(P.imag) == 0:
        raise ValueError("valency undefined for constants")
    span = max(np.ptp(P.real), np.ptp(P.imag))
    cands = [0j, complex(fm.evaluate(h, c))]
    delta = 1e-6 * span
    for zc in _critical_points(h, d):
        v = complex(fm.evaluate(h, zc))
        cands.append(v)
        cands.extend(v + delta * np.exp(2j * np.pi * np.arange(8) / 8))
    gx = np.linspace(P.real.min(), P.real.max(), budget)
    gy = np.linspace(P.imag.min(), P.imag.max(), budget)
    U = np.concatenate([np.asarray(cands, dtype=complex),
                        (gx[None, :] + 1j * gy[:, None]).ravel()])
    W = np.concatenate([_polygon_winding(P, U[:len(cands)]), _grid_winding(P, gx, gy)])
    dh = fm.diff(h, 0)
    best, best_u, tried = 0, 0j, []
    for w in sorted(set(W.tolist()), reverse=True):
        if w <= best:
            break
        idx = np.flatnonzero(W == w)
        idx = idx[np.argsort(np.abs(U[idx]), kind="stable")][:6]
        for i in idx:
            u = complex(U[i])
            try:
                n = count_zeros(h - u, d, _dh=dh, _track=False).count
            except IndeterminateCountError:
                continue
            tried.append((-u, n))
            if n > best or (n == best and abs(u) < abs(best_u)):
                best, best_u = int(n), u
            if n == w:
                break
        if best >= w:
            break
    if best == 0:
        n0 = count_zeros(h, d, _dh=dh, _track=False).count
        best, best_u = int(max(n0, 0)), 0j
    return ValencyData(int(best), -best_u, budget, alternatives=tried)


# -------------------------------------------------------- Bernstein index

def _circle_max_batch(h, centers: np.ndarray, radii: np.ndarray, nodes: int = 128) -> np.ndarray:
    th = 2 * np.pi * np.arange(nodes) / nodes
    pts = centers[:, None] + radii[:, None] * np.exp(1j * th)[None, :]
    vals = np.asarray(fm.log_abs(h, pts.ravel())).reshape(pts.shape)
    return vals.max(axis=1)


def bernstein_index(h, region, density: int = 8) -> BernsteinIndexData:
    """``sup m_h(e s, z) - m_h(s, z)`` over subdisks ``D_{es}(z)`` compactly inside the disk."""
    _check_univariate(h)
    d = _as_disk(region)
    z0, R = d.center[0], d.radius
    if is_identically_zero(h, d) or fm.is_structurally_constant(h):
        return BernsteinIndexData(0.0, (z0, R / (2 * math.e)))
    e = math.e
    margin = 1.0 - 1e-9
    rings = np.arange(density) / density
    centers = [z0]
    for rho in rings[1:]:
        k = max(6, int(round(2 * density * rho)) * 2)
        centers.extend(z0 + rho * R * np.exp(2j * np.pi * (np.arange(k) + 0.5 * (rho > 0.5)) / k))
    centers = np.asarray(centers)
    smax = (R - np.abs(centers - z0)) * margin / e
    fracs = np.geomspace(1e-2, 1.0, 6)
    C = np.repeat(centers, fracs.size)
    S = (smax[:, None] * fracs[None, :]).ravel()
    val = _circle_max_batch(h, C, e * S) - _circle_max_batch(h, C, S)
    val = np.where(np.isfinite(val), val, -np.inf)
    top = float(val.max())
    ties = np.flatnonzero(val >= top - 1e-12 * max(1.0, abs(top)))
    order = sorted(ties, key=lambda i: (abs(C[i] - z0), S[i]))
    i0 = order[0]
    best_val, best_z, best_s = top, complex(C[i0]), float(S[i0])

    def neg(x):
        z = z0 + R * complex(x[0], x[1])
        dist = abs(z - z0)
        if dist >= R * 0.999:
            return 1e6
        s = (R - dist) * margin / e
        v = _circle_max_batch(h, np.array([z, z]), np.array([e * s, s]), 512)
        return -(v[0] - v[1]) if np.all(np.isfinite(v)) else 1e6

    x0 = np.array([(best_z - z0).real, (best_z - z0).imag]) / R
    res = optimize.minimize(neg, x0, method="Nelder-Mead",
                            options={"xatol": 1e-6, "fatol": 1e-12, "maxiter": 80,
                                     "initial_simplex": np.array([x0, x0 + [0.02, 0], x0 + [0, 0.02]])})
    if -res.fun > best_val + 1e-9 * max(1.0, abs(best_val)):
        z = z0 + R * complex(res.x[0], res.x[1])
        best_z, best_s = z, (R - abs(z - z0)) * margin / e
    exact = log_max(h, e * best_s, best_z) - log_max(h, best_s, best_z)
    return BernsteinIndexData(max(0.0, float(exact)), (complex(best_z), float(best_s)))


# ------------------------------------------------------------------ bounds

def vp_zero_bound(h, R: float, beta: float) -> float:
    """``(m_h(R) - m_h(beta R)) / ln((1 + beta^2) / (2 beta))``; bounds the zeros in ``D_{beta R}``."""
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    num = log_max(h, R) - log_max(h, beta * R)
    return num / math.log((1 + beta ** 2) / (2 * beta))


def valency_lower_bound(h, R: float, t: float, s: float) -> float:
    """``max{(m_h(R/t) - m_h(R/s)) / k(t, s), 1}``; bounds the valency on ``D_{R/sqrt t}`` from below."""
    if fm.is_structurally_constant(h):
        raise ValueError("h must be nonconstant")
    ratio = (log_max(h, R / t) - log_max(h, R / s)) / K.k_ts(t, s)
    return max(ratio, 1.0)
