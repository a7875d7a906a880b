"""Composite growth quantities: admissibility, V_f, N_f and class parameters.

A function ``f`` on the ball of radius ``t r`` is *admissible* when
``M_f(r/t) / M_f(r/t^2) >= t``; its growth is then summarised by
``M1 = M_f(r/t)``, ``M2 = M_f(t r)`` and the integer-like quantity
``N_f(r, t)``.  A function ``g`` of ``n + 1`` variables is summarised by
the pair ``(p, q)``: the worst growth of its slices along complex lines
from radius ``r`` to ``t r``, and the worst Bernstein index of its slices
in the last variable.
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
from .modulus import (DegenerateFunctionError, disk, is_identically_zero, log_max,
                      sphere_directions)

__all__ = [
    "GrowthData", "ClassParams", "check_admissibility", "n_f_quantity", "class_params",
    "class_params_exp_poly", "line_directions", "line_slice", "vertical_slice",
]


@dataclass
class GrowthData:
    r: float
    t: float
    M1_log: float
    M2_log: float
    R_log_samples: list = field(default_factory=list)
    V_f: int | None = None
    N_f: float | None = None
    vanishing_order_at_0: int | None = None
    admissible: bool | None = None
    R_t2_log: float | None = None
    sup_term: float | None = None
    line_valencies: list = field(default_factory=list)
    shifted: "GrowthData | None" = None
    shift_value: complex | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "shifted"}
        if self.shifted is not None:
            out["shifted"] = self.shifted.to_dict()
        return out


@dataclass
class ClassParams:
    p: float
    q: float
    r: float
    t: float
    M2_log: float
    lines_sampled: int
    points_sampled: int
    p_witness: dict = field(default_factory=dict)
    q_witness: dict = field(default_factory=dict)
    rounds: list = field(default_factory=list)
    stable: bool = True
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


# ------------------------------------------------------------------ helpers

def _nvars(f) -> int:
    return f.nvars


def line_directions(n: int, count: int) -> np.ndarray:
    """Unit vectors of ``C^n`` spanning ``count`` sampled lines through 0.

    The coordinate axes come first, followed by low-discrepancy directions,
    so a larger budget always extends a smaller one.
    """
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    axes = np.eye(n, dtype=complex)
    if count <= n:
        return axes[:count]
    g = sphere_directions(2 * n, count - n)
    return np.vstack([axes, g[:, :n] + 1j * g[:, n:]])


def line_slice(g: fm.Expr, v, w: complex) -> fm.Expr:
    """``zeta -> g(zeta v, w)`` as a univariate expression."""
    v = np.asarray(v, dtype=complex)
    n = g.nvars - 1
    if isinstance(g, fm.Poly):
        acc: dict[tuple, complex] = {}
        for c, e in g.terms:
            a, b = e[:n], e[n]
            k = (int(sum(a)),)
            acc[k] = acc.get(k, 0j) + c * complex(np.prod(v ** np.asarray(a))) * complex(w) ** b
        return fm.Poly(1, tuple((c, k) for k, c in acc.items()))
    base = g if w == 0 else fm.Shift(g, (0j,) * n + (complex(w),))
    return fm.restrict_to_line(base, tuple(v) + (0j,))


def vertical_slice(g: fm.Expr, z) -> fm.Expr:
    """``w -> g(z, w)`` as a univariate expression."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    n = g.nvars - 1
    if isinstance(g, fm.Poly):
        acc: dict[tuple, complex] = {}
        for c, e in g.terms:
            a, b = e[:n], e[n]
            acc[(b,)] = acc.get((b,), 0j) + c * complex(np.prod(z ** np.asarray(a)))
        return fm.Poly(1, tuple((c, k) for k, c in acc.items()))
    base = g if not np.any(z) else fm.Shift(g, tuple(z) + (0j,))
    return fm.restrict_to_line(base, (0j,) * n + (1 + 0j,))


def _origin_value(f) -> complex:
    return complex(fm.evaluate(f, np.zeros((1, f.nvars), dtype=complex))[0])


# ------------------------------------------------------------ admissibility

def _growth_core(f, r: float, t: float, tol: float) -> GrowthData:
    M1 = log_max(f, r / t)
    M2 = log_max(f, t * r)
    inner = log_max(f, r / t ** 2)
    gd = GrowthData(r=r, t=t, M1_log=M1, M2_log=M2)
    if M2 == -math.inf:
        gd.admissible = False
        gd.R_t2_log = math.nan
        gd.notes.append("f vanishes identically")
        return gd
    gd.R_t2_log = M1 - inner if inner > -math.inf else math.inf
    gd.admissible = bool(gd.R_t2_log >= math.log(t) - tol)
    return gd


def check_admissibility(f: fm.Expr, r: float, t: float, tol: float = 1e-9
                        ) -> tuple[bool, GrowthData]:
    """Check ``R_f(r, t, t^2) >= t`` and record ``M1 = M_f(r/t)``, ``M2 = M_f(t r)``.

    On failure the returned data carries, under ``shifted``, the same
    check for ``f - f(0)``, which is admissible whenever it is nonzero.
    """
    t = K._check_t(t)
    if not r > 0:
        raise K.ParameterRangeError(f"r = {r!r} violates r > 0")
    gd = _growth_core(f, r, t, tol)
    if gd.admissible or gd.M2_log == -math.inf:
        return bool(gd.admissible), gd
    f0 = _origin_value(f)
    g = f - f0
    sd = _growth_core(g, r, t, tol)
    sd.notes.append("data for f - f(0)")
    gd.shifted = sd
    gd.shift_value = f0
    return False, gd


# ------------------------------------------------------------------- N_f

def _order_at_0(f, r: float, dirs: np.ndarray) -> int:
    if f.nvars == 1:
        return Z.vanishing_order(f, r)
    orders = []
    for v in dirs:
        h = fm.restrict_to_line(f, fm.Line.through(v))
        if fm.is_structurally_zero(h) or is_identically_zero(h, disk(r)):
            continue
        orders.append(Z.vanishing_order(h, r))
    return min(orders) if orders else 0


def _sup_term(f, r: float, t: float, s_points: int, s_max_factor: float,
              M1: float) -> tuple[float, list]:
    lt = math.log(t)

    def term(log_s: float) -> tuple[float, float]:
        s = max(math.exp(log_s), t)  # exp(ln t) may round below t
        inner = log_max(f, r / s)
        lnR = M1 - inner
        return (lnR - 0.5 * lt) / K.k_ts(t, s), lnR

    grid = np.linspace(lt, lt + math.log(s_max_factor), s_points)
    vals, samples = [], []
    for ls in grid:
        v, lnR = term(float(ls))
        vals.append(v)
        samples.append((float(math.exp(ls)), float(lnR)))
    vals = np.asarray(vals)
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(lambda x: -term(float(x))[0], bounds=(lo, hi),
                                       method="bounded", options={"xatol": 1e-10})
        best = max(best, float(-res.fun))
    return best, samples


def n_f_quantity(f: fm.Expr, r: float, t: float, line_budget: int = 8,
                 s_grid: int = 64, s_max_factor: float = 1e6,
                 admissibility: GrowthData | None = None) -> GrowthData:
    """``N_f(r, t)`` together with ``V_f``, the ``R_f`` samples and the order at 0.

    For ``n = 1`` this is the valency of ``f`` on ``D_{r/sqrt t}``.  For
    ``n >= 2`` the supremum over ``s in [t, inf)`` is taken on a log grid
    and completed by its limit as ``s -> inf``, the vanishing order at 0.
    """
    t = K._check_t(t)
    gd = admissibility if admissibility is not None else _growth_core(f, r, t, 1e-9)
    if gd.M2_log == -math.inf:
        raise DegenerateFunctionError("N_f is undefined for the zero function")
    rho = r / math.sqrt(t)
    n = _nvars(f)
    dirs = line_directions(n, line_budget)
    vals = []
    if n == 1:
        if fm.is_structurally_constant(f):
            raise ValueError("f is constant")
        vals.append(Z.valency(f, disk(rho)).valency)
    else:
        for v in dirs:
            h = fm.restrict_to_line(f, fm.Line.through(v))
            if fm.is_structurally_constant(h):
                continue
            try:
                vals.append(Z.valency(h, disk(rho)).valency)
            except ValueError:
                continue
        if not vals:
            raise ValueError("f constant on all sampled lines")
    gd.line_valencies = [int(x) for x in vals]
    gd.V_f = int(min(vals))
    gd.vanishing_order_at_0 = _order_at_0(f, r, dirs)
    sup, samples = _sup_term(f, r, t, s_grid, s_max_factor, gd.M1_log)
    gd.R_log_samples = samples
    gd.sup_term = max(sup, float(gd.vanishing_order_at_0))
    if n == 1:
        gd.N_f = float(gd.V_f)
    else:
        gd.N_f = float(max(gd.sup_term, gd.V_f))
    return gd


# ------------------------------------------------------------ class params

def _disk_points(radius: float, count: int) -> np.ndarray:
    """Points of the closed disk: the centre, half on the circle, a quarter on
    geometrically shrinking radii (small-modulus slices), the rest Halton."""
    nb = max(1, (count + 1) // 2)
    pts = [np.zeros(1, dtype=complex), radius * np.exp(2j * np.pi * np.arange(nb) / nb)]
    ng = count // 4
    if ng > 0:
        rad = radius * np.geomspace(0.5, 1e-6, ng)
        pts.append(rad * np.exp(2j * np.pi * 0.6180339887498949 * np.arange(1, ng + 1)))
    rest = count - nb - ng - 1
    if rest > 0:
        h = qmc.Halton(d=2, scramble=False).random(rest + 1)[1:]
        pts.append(radius * np.sqrt(h[:, 0]) * np.exp(2j * np.pi * h[:, 1]))
    return np.concatenate(pts)[:max(count, 1)]


def _ball_points(n: int, radius: float, count: int) -> np.ndarray:
    """Points of the open ball ``B_radius`` in ``C^n``: the centre, then shells."""
    if n == 1:
        return _disk_points(radius * (1 - 1e-9), max(count, 1))[:count].reshape(-1, 1)
    g = sphere_directions(2 * n, max(count - 1, 1))
    u = g[:, :n] + 1j * g[:, n:]
    shells = np.where(np.arange(u.shape[0]) % 3 == 2, 0.5, 1 - 1e-9)
    pts = u * (radius * shells)[:, None]
    return np.vstack([np.zeros((1, n), dtype=complex), pts])[:count]


def _p_value(g, r, t, dirs, ws):
    best, wit = 0.0, {}
    for v in dirs:
        for w in ws:
            h = line_slice(g, v, complex(w))
            if fm.is_structurally_constant(h):
                continue
            lo = log_max(h, r)
            if lo == -math.inf:
                continue
            val = log_max(h, t * r) - lo
            if val > best:
                best, wit = float(val), {"line": list(v), "w": complex(w)}
    return best, wit


def _q_value(g, radius, zs):
    best, wit = 0.0, {}
    for z in zs:
        h = vertical_slice(g, z)
        if fm.is_structurally_constant(h):
            continue
        bi = Z.bernstein_index(h, disk(radius))
        if bi.value > best:
            best, wit = float(bi.value), {"z": list(z), "subdisk": list(bi.witness_subdisk)}
    return best, wit


def class_params(g: fm.Expr, r: float, t: float, M2_log: float, line_budget: int = 4,
                 w_budget: int = 8, z_budget: int = 6, max_rounds: int = 3,
                 rel_change: float = 0.01) -> ClassParams:
    """Sampled lower bounds for the smallest ``(p, q)`` with ``g`` in the class.

    Budgets double until both values move by less than ``rel_change``
    (relative) between rounds.  Point sets are nested, so the values are
    nondecreasing in the budgets.
    """
    n = g.nvars - 1
    if n < 1:
        raise fm.ArityError("g needs at least two variables")
    if M2_log > 700:
        raise OverflowError("3 M2 does not fit in a double")
    wrad = 3.0 * math.exp(M2_log)
    rounds = []
    p = q = 0.0
    pw = qw = {}
    L, W, Zb = line_budget, w_budget, z_budget
    stable = False
    for k in range(max_rounds):
        dirs = line_directions(n, L)
        ws = _disk_points(wrad, W)
        zs = _ball_points(n, t * r, Zb)
        p_new, pw_new = _p_value(g, r, t, dirs, ws)
        q_new, qw_new = _q_value(g, wrad, zs)
        if p_new >= p:
            p, pw = p_new, pw_new or pw
        if q_new >= q:
            q, qw = q_new, qw_new or qw
        rounds.append({"lines": int(dirs.shape[0]), "w_points": int(ws.size),
                       "z_points": int(zs.shape[0]), "p": p, "q": q})
        if k > 0:
            prev = rounds[-2]
            dp = abs(p - prev["p"]) / max(abs(p), 1e-12)
            dq = abs(q - prev["q"]) / max(abs(q), 1e-12)
            if (dp < rel_change or p < 1e-12) and (dq < rel_change or q < 1e-12):
                stable = True
                break
        L, W, Zb = (L * 2 if n > 1 else L), W * 2, Zb * 2
    last = rounds[-1]
    return ClassParams(p=p, q=q, r=r, t=t, M2_log=M2_log, lines_sampled=last["lines"],
                       points_sampled=last["w_points"] + last["z_points"], p_witness=pw,
                       q_witness=qw, rounds=rounds, stable=stable,
                       notes=["p and q are sampled lower bounds of the defining suprema"])


def class_params_exp_poly(g: fm.ExpPoly, r: float, f: fm.Expr) -> ClassParams:
    """Closed-form caps for an exponential polynomial at radius ``e r`` with ``t = e``.

    ``p = m(g) + 2 e^2 eps(g) r`` and ``q = m(g) + 6 eps(g) M_f(e^2 r)``,
    replaced by ``q = max_j deg p_j`` when no exponent involves ``w``.
    Both caps for ``q`` are reported; ``q`` is the smaller applicable one.
    """
    if not isinstance(g, fm.ExpPoly):
        raise TypeError("class_params_exp_poly needs an ExpPoly")
    e = math.e
    m, eps = g.degree_sum, g.exp_type
    mf = log_max(f, e * e * r)
    p = m + 2 * e * e * eps * r
    q_general = m + 6 * eps * math.exp(mf) if eps > 0 else float(m)
    w_free = all(abs(lin[-1]) == 0 for _, lin in g.parts)
    notes = []
    q = q_general
    q_wfree = None
    if w_free:
        q_wfree = float(max(p_j.degree for p_j, _ in g.parts))
        q = min(q, q_wfree)
        notes.append("exponents do not involve w")
    cp = ClassParams(p=float(p), q=float(q), r=e * r, t=e, M2_log=mf, lines_sampled=0,
                     points_sampled=0, notes=notes)
    cp.q_witness = {"q_general": float(q_general), "q_w_free": q_wfree,
                    "degree": m, "exp_type": eps}
    return cp
