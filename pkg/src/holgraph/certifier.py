"""End-to-end certificates for inequalities on graph restrictions ``g_f``.

Each routine checks one conditional inequality numerically and returns
:class:`~holgraph.reports.CertReport` objects.  A failed premise is an
outcome (status ``hypothesis_not_met``), never an exception, so a batch run
documents which assumption was missing.  All sides are natural logarithms
unless a report says ``scale="count"`` or ``scale="value"``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import constants as K
from . import geometry as G
from . import funcmodel as fm
from . import zeros as Z
from .modulus import ball, disk, is_identically_zero, log_max, max_modulus_product
from .quantities import (ClassParams, GrowthData, _disk_points, check_admissibility,
                         class_params, class_params_exp_poly, line_directions, n_f_quantity)
from .reports import CertReport, make_report

__all__ = [
    "DEFAULT_BUDGETS", "Te1Setup", "CellSet", "ProbeReport", "te1_setup", "certify_te1",
    "certify_corollaries", "certify_markov", "certify_te12", "certify_te13_instance",
    "probe_te14_condition", "ex1_chain", "certify_example_ex1", "sharpness_witness",
    "grid_cells_in_ball", "directional_expr", "certify_te2_instance", "certify_cartan",
    "certify_cartan_cover",
]

DEFAULT_BUDGETS = {
    "line_budget": 4, "w_budget": 8, "z_budget": 6, "max_rounds": 3,
    "nf_line_budget": 8, "nf_s_grid": 64, "sup_samples": 4096,
    "s_grid": 6, "v_grid": 4,
}

DEGENERATE_NOTE = ("degenerate: g_f vanishes identically while p exceeds the threshold "
                   "(ex1 counterexample regime)")


def _budgets(b: dict | None) -> dict:
    out = dict(DEFAULT_BUDGETS)
    if b:
        unknown = set(b) - set(out)
        if unknown:
            raise ValueError(f"unknown budget keys: {sorted(unknown)}")
        out.update(b)
    return out


def _region(n: int, radius: float, center=None):
    if n == 1:
        return disk(radius, 0j if center is None else complex(np.atleast_1d(center)[0]))
    return ball(radius, center=center, n=n)


def _w(point) -> list:
    return [complex(x) for x in np.atleast_1d(point)]


def directional_expr(h: fm.Expr, v) -> fm.Expr:
    """``D_v h`` as an expression (symbolic partials)."""
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    terms = [complex(vi) * fm.diff(h, i) for i, vi in enumerate(v) if vi != 0]
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def _increment_report(name: str, tag: str, m_lo: float, m_hi: float, bound: float,
                      tol: float, **kw) -> CertReport:
    """``m_hi <= bound + m_lo`` with the margin computed as ``bound - (m_hi - m_lo)``.

    Computing the margin from the increment makes reports of the same
    increment agree bit for bit, whatever they call their sides.
    """
    rep = make_report(name, tag, m_hi, bound + m_lo, tol, **kw)
    rep.params = {**rep.params, "increment": m_hi - m_lo, "bound": bound}
    if math.isfinite(m_lo) and math.isfinite(m_hi):
        rep.margin_log = bound - (m_hi - m_lo)
        rep.passed = bool(rep.margin_log >= -tol)
        if kw.get("status") is None:
            rep.status = "pass" if rep.passed else "fail"
    return rep


def _worst(name: str, tag: str, subs: list[CertReport], tol: float, **kw) -> CertReport:
    """Summary report carrying the smallest-margin sub-report's sides."""
    ranked = sorted(subs, key=lambda s: (s.margin_log if not math.isnan(s.margin_log)
                                         else -math.inf))
    w = ranked[0]
    status = kw.pop("status", None)
    rep = make_report(name, tag, w.lhs_log, w.rhs_log, tol, status=status, **kw)
    rep.margin_log = w.margin_log
    rep.passed = all(s.passed for s in subs)
    if status is None:
        rep.status = "pass" if rep.passed else "fail"
    rep.witnesses = list(w.witnesses)
    rep.sub_reports = subs
    return rep


# ------------------------------------------------------------ main theorem

@dataclass
class Te1Setup:
    """Everything the main theorem and its corollaries share."""

    f: fm.Expr
    g: fm.Expr
    r: float
    t: float
    f_used: fm.Expr
    g_used: fm.Expr
    gf: fm.Expr
    growth: GrowthData | None
    cp: ClassParams | None
    c: float
    p: float
    q: float
    N_f: float
    hypothesis_ok: bool
    gf_zero: bool
    shifted: bool = False
    shift_value: complex | None = None
    admissible: bool = True
    constants: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def tags(self) -> tuple[str, str]:
        return ("e15'", "e18'") if self.shifted else ("e15", "e18")

    @property
    def n(self) -> int:
        return self.f.nvars

    @property
    def status_if_unmet(self) -> str:
        return "degenerate" if self.gf_zero else "hypothesis_not_met"


def te1_setup(f: fm.Expr, g: fm.Expr, r: float, t: float, budgets: dict | None = None,
              pq: tuple[float, float] | None = None) -> Te1Setup:
    """Admissibility, ``N_f``, class parameters and constants for ``(f, g)``.

    ``pq`` replaces the sampled class parameters by caller-supplied ones
    (for instance the Bernstein values ``(k ln 9, l)`` of a polynomial).
    """
    b = _budgets(budgets)
    n = f.nvars
    if g.nvars != n + 1:
        raise fm.ArityError(f"g must have {n + 1} variables, got {g.nvars}")
    ok, gd = check_admissibility(f, r, t)
    notes = []
    f_used, g_used, shifted, shift_value = f, g, False, None
    if not ok:
        sd = gd.shifted
        if sd is not None and sd.admissible:
            shift_value = gd.shift_value
            f_used = f - shift_value
            g_used = fm.shift(g, (0j,) * n + (complex(shift_value),))
            shifted = True
            gd = sd
            ok = True
            notes.append("R_f(r,t,t^2) < t: working with f - f(0) and g(z, w + f(0))")
    gf = fm.graph_restriction(g, f)
    gf_zero = is_identically_zero(gf, _region(n, t * r))
    params = {"f": fm.to_dict(f), "g": fm.to_dict(g), "r": r, "t": t, "budgets": b,
              "pq_supplied": list(pq) if pq is not None else None}
    if not ok:
        notes.append("f fails admissibility even after removing f(0)")
        return Te1Setup(f, g, r, t, f_used, g_used, gf, gd, None, math.nan, math.nan,
                        math.nan, math.nan, False, gf_zero, admissible=False,
                        constants=K.eval_constants(t).to_dict(), params=params, notes=notes)
    gd = n_f_quantity(f_used, r, t, line_budget=b["nf_line_budget"], s_grid=b["nf_s_grid"],
                      admissibility=gd)
    if pq is None:
        cp = class_params(g_used, r, t, gd.M2_log, line_budget=b["line_budget"],
                          w_budget=b["w_budget"], z_budget=b["z_budget"],
                          max_rounds=b["max_rounds"])
        p, q = cp.p, cp.q
    else:
        cp = None
        p, q = float(pq[0]), float(pq[1])
    cb = K.eval_constants(t, log_M1=gd.M1_log, log_M2=gd.M2_log)
    c = cb.c_M1M2_t
    hyp = bool(p <= cb.nf_threshold * gd.N_f + 1e-12)
    if not hyp:
        notes.append(f"p = {p:.6g} exceeds ln((1+t)/(2 sqrt t)) N_f = "
                     f"{cb.nf_threshold * gd.N_f:.6g}")
    if gf_zero:
        notes.append("g_f vanishes identically")
    params.update({"p": p, "q": q, "N_f": gd.N_f, "M1_log": gd.M1_log, "M2_log": gd.M2_log,
                   "shift_value": shift_value,
                   "class_params": cp.to_dict() if cp is not None else None})
    return Te1Setup(f, g, r, t, f_used, g_used, gf, gd, cp, c, p, q, gd.N_f, hyp, gf_zero,
                    shifted, shift_value, True, cb.to_dict(), params, notes)


def _sup_graph_box(su: Te1Setup, samples: int):
    blocks = [_region(su.n, su.r), disk(math.exp(su.growth.M2_log))]
    return max_modulus_product(su.g_used, blocks, samples=samples)


def certify_te1(f: fm.Expr, g: fm.Expr, r: float, t: float, tol: float = 1e-9,
                budgets: dict | None = None, pq: tuple[float, float] | None = None,
                setup: Te1Setup | None = None) -> tuple[CertReport, CertReport]:
    """Certify the sup bound over ``B_r x D_{M2}`` and the growth bound of ``g_f``.

    Both right-hand sides are ``c(M1, M2, t)(p + q) + m_{g_f}(r)``.
    """
    su = setup or te1_setup(f, g, r, t, budgets, pq)
    b = _budgets(su.params.get("budgets"))
    t15, t18 = su.tags
    common = {"constants": su.constants, "params": su.params, "notes": list(su.notes)}
    if not su.admissible:
        nan = math.nan
        return (make_report("te1_sup", t15, nan, nan, tol, status="hypothesis_not_met", **common),
                make_report("te1_growth", t18, nan, nan, tol, status="hypothesis_not_met",
                            **{**common, "notes": list(su.notes)}))
    status = None
    if not su.hypothesis_ok:
        status = su.status_if_unmet
        if status == "degenerate":
            common["notes"].append(DEGENERATE_NOTE)
    bound = su.c * (su.p + su.q)
    m_r = log_max(su.gf, r)
    m_tr = log_max(su.gf, t * r)
    sup = _sup_graph_box(su, b["sup_samples"])
    rep15 = make_report("te1_sup", t15, sup.log_value, bound + m_r, tol, status=status,
                        witnesses=[_w(sup.witness)], **common)
    rep18 = _increment_report("te1_growth", t18, m_r, m_tr, bound, tol, status=status,
                              constants=su.constants, params=su.params,
                              notes=list(common["notes"]))
    return rep15, rep18


# ------------------------------------------------------------ corollaries

@dataclass(frozen=True)
class CellSet:
    """A finite union of axis-aligned cubes inside ``B_s(z)``.

    Real coordinates are ordered ``(Re z_1..Re z_n, Im z_1..Im z_n)``; a cell
    with integer index ``k`` is ``Re/Im(center) + h [k, k + 1]`` per axis.
    ``full_ball`` stands for the whole ball (measure ratio 1).
    """

    n: int
    center: tuple
    s: float
    h: float = 0.0
    cells: tuple = ()
    full_ball: bool = False

    def measure_ratio(self) -> float:
        if self.full_ball:
            return 1.0
        vol_ball = math.pi ** self.n * self.s ** (2 * self.n) / math.factorial(self.n)
        return len(self.cells) * self.h ** (2 * self.n) / vol_ball

    def _origin(self) -> np.ndarray:
        z = np.asarray(self.center, dtype=complex)
        return np.concatenate([z.real, z.imag])

    def validate(self) -> None:
        if self.full_ball:
            return
        if not self.cells:
            raise ValueError("the set has zero measure")
        if len(set(self.cells)) != len(self.cells):
            raise ValueError("cells repeat")
        corners = np.array(list(itertools.product((0, 1), repeat=2 * self.n)))
        for c in self.cells:
            pts = (np.asarray(c)[None, :] + corners) * self.h
            if np.max(np.linalg.norm(pts, axis=1)) > self.s * (1 + 1e-12):
                raise ValueError(f"cell {c} leaves the ball")

    def sample_points(self, per_axis: int = 3) -> np.ndarray:
        """Points on a tensor grid in every cell (closed cells)."""
        base = self._origin()
        if self.full_ball:
            raise ValueError("sample the full ball through max_modulus instead")
        u = np.linspace(0.0, 1.0, per_axis)
        grid = np.array(list(itertools.product(u, repeat=2 * self.n)))
        pts = [(np.asarray(c)[None, :] + grid) * self.h for c in self.cells]
        x = base[None, :] + np.vstack(pts)
        return x[:, :self.n] + 1j * x[:, self.n:]

    def to_dict(self) -> dict:
        return {"n": self.n, "center": list(self.center), "s": self.s, "h": self.h,
                "cells": [list(c) for c in self.cells], "full_ball": self.full_ball,
                "lambda": self.measure_ratio()}


def grid_cells_in_ball(n: int, s: float, h: float, center=None, keep=None) -> CellSet:
    """All grid cells of side ``h`` lying in the closed ball ``B_s(center)``.

    ``keep`` optionally filters cells by their integer index tuple.
    """
    center = tuple([0j] * n if center is None else _w(center))
    m = int(math.ceil(s / h))
    corners = np.array(list(itertools.product((0, 1), repeat=2 * n)))
    cells = []
    for idx in itertools.product(range(-m, m), repeat=2 * n):
        pts = (np.asarray(idx)[None, :] + corners) * h
        if np.max(np.linalg.norm(pts, axis=1)) <= s * (1 + 1e-12):
            if keep is None or keep(idx):
                cells.append(tuple(int(i) for i in idx))
    return CellSet(n, center, float(s), float(h), tuple(cells))


def _remez_terms(lam: float, n: int) -> tuple[float, float]:
    """``ln Phi((1+u)/(1-u))`` with ``u = (1-lam)^(1/2n)``, and ``ln(8n/lam)``."""
    u = (1.0 - lam) ** (1.0 / (2 * n)) if lam < 1 else 0.0
    x = (1.0 + u) / (1.0 - u)
    return math.acosh(x), math.log(8.0 * n / lam)


def _sup_on_set(gf: fm.Expr, omega: CellSet) -> tuple[float, list]:
    if omega.full_ball:
        v = log_max(gf, omega.s, omega.center)
        return v, []
    pts = omega.sample_points()
    vals = np.asarray(fm.log_abs(gf, pts), dtype=float)
    i = int(np.argmax(vals))
    return float(vals[i]), _w(pts[i])


def _log_mul(a: float, log_b: float) -> float:
    return math.log(a) + log_b if a > 0 else -math.inf


def _derivative_sup(h: fm.Expr, n: int, s: float, dirs: np.ndarray) -> tuple[float, list]:
    best, wit = -math.inf, []
    for v in dirs:
        dh = directional_expr(h, v)
        val = log_max(dh, s)
        if val > best:
            best, wit = val, [_w(v)]
    return best, wit


def certify_corollaries(f: fm.Expr, g: fm.Expr, r: float, t: float,
                        params: dict | None = None, tol: float = 1e-9,
                        setup: Te1Setup | None = None) -> list[CertReport]:
    """Bernstein, Markov, Remez (two forms) and Jensen consequences of the growth bound.

    ``params`` may hold ``budgets``, ``pq``, ``s_values`` (radii in
    ``(0, r]``), ``omega`` (a :class:`CellSet`) and ``remez_center`` /
    ``remez_s`` for the ball ``B_s(z)`` inside ``B_r``.
    """
    params = dict(params or {})
    su = setup or te1_setup(f, g, r, t, params.get("budgets"), params.get("pq"))
    b = _budgets(su.params.get("budgets"))
    n = su.n
    status = None if su.hypothesis_ok else su.status_if_unmet
    common = {"constants": su.constants}
    if not su.admissible:
        nan = math.nan
        return [make_report(nm, tag, nan, nan, tol, status="hypothesis_not_met",
                            notes=list(su.notes), **common)
                for nm, tag in (("bernstein", "e110"), ("markov_gf", "e111"),
                                ("remez_phi", "e112"), ("remez_8n", "e112"),
                                ("jensen", "e113"))[: 5 if n == 1 else 4]]
    bound = su.c * (su.p + su.q)
    s_values = params.get("s_values")
    if s_values is None:
        s_values = [r * x for x in np.geomspace(1.0, 0.05, b["s_grid"])]
    s_values = sorted({float(s) for s in s_values} | {float(r)}, reverse=True)
    if any(not 0 < s <= r for s in s_values):
        raise ValueError("radii must lie in (0, r]")
    gf = su.gf
    reports = []

    subs = []
    for s in s_values:
        subs.append(_increment_report("bernstein_s", "e110", log_max(gf, s), log_max(gf, t * s),
                                      bound, tol, status=status, params={"s": s}))
    reports.append(_worst("bernstein", "e110", subs, tol, status=status, notes=list(su.notes),
                          params={**su.params, "s_values": s_values}, **common))

    c1 = K.c1_t(t)
    dirs = line_directions(n, b["v_grid"])
    subs = []
    for s in s_values:
        lhs, wit = _derivative_sup(gf, n, s, dirs)
        rhs = _log_mul(c1 * bound, log_max(gf, s)) - math.log(s)
        subs.append(make_report("markov_gf_s", "e111", lhs, rhs, tol, status=status,
                                params={"s": s}, witnesses=wit))
    reports.append(_worst("markov_gf", "e111", subs, tol, status=status, notes=list(su.notes),
                          params={**su.params, "s_values": s_values,
                                  "directions": [_w(v) for v in dirs]}, **common))

    z0 = params.get("remez_center")
    z0 = tuple([0j] * n if z0 is None else _w(z0))
    s0 = float(params.get("remez_s", r))
    if float(np.linalg.norm(np.asarray(z0))) + s0 > r * (1 + 1e-12):
        raise ValueError("the Remez ball must lie inside B_r")
    omega = params.get("omega")
    if omega is None:
        omega = grid_cells_in_ball(n, s0, s0 / (4 if n == 1 else 2), z0)
    omega.validate()
    lam = omega.measure_ratio()
    if not lam > 0:
        raise ValueError("the set has zero measure")
    lhs = log_max(gf, s0, z0)
    sup_om, wit = _sup_on_set(gf, omega)
    phi_term, eight_term = _remez_terms(lam, n)
    c2 = K.c2_t(t)
    rp = {**su.params, "omega": omega.to_dict(), "lambda": lam, "s": s0, "z": list(z0),
          "log_phi": phi_term, "log_8n": eight_term}
    reports.append(make_report("remez_phi", "e112", lhs, _log_add(c2 * bound * phi_term, sup_om),
                               tol, status=status, params=rp, witnesses=[wit] if wit else [],
                               notes=list(su.notes) + ["sup over omega is sampled on a cell grid"],
                               **common))
    reports.append(make_report("remez_8n", "e112", lhs, _log_add(c2 * bound * eight_term, sup_om),
                               tol, status=status, params=rp, witnesses=[wit] if wit else [],
                               notes=list(su.notes), **common))

    if n == 1:
        zd = Z.count_zeros(gf, disk(r))
        cnt = math.inf if zd.identically_zero else float(zd.count)
        denom = math.log((1.0 + t * t) / (2.0 * t))
        reports.append(make_report("jensen", "e113", cnt, bound / denom, tol, status=status,
                                   scale="count", params={**su.params, "denominator": denom},
                                   notes=list(su.notes), **common))
    return reports


def _log_add(term: float, log_val: float) -> float:
    # term is a coefficient times a log factor; 0 * inf never arises since
    # the factors are finite for lambda > 0
    return term + log_val


# ----------------------------------------------------------------- Markov

def certify_markov(h: fm.Expr, R: float, t: float, v=None, tol: float = 1e-9,
                   line_budget: int = 8) -> CertReport:
    """``M_{D_v h}(R) <= kappa(d; t) M_h(R) / R`` with ``d = m_h(tR) - m_h(R)``.

    With ``v=None`` the supremum also runs over a direction grid.  Sub-reports
    cover ``kappa(d; e) < 9d`` when ``t = e`` and, when ``d`` is below
    ``ln((1+t)/(2 sqrt t))``, the absence of zeros in ``B_{sqrt(t) R}``.
    """
    t = K._check_t(t)
    n = h.nvars
    m_R = log_max(h, R)
    m_tR = log_max(h, t * R)
    if m_R == -math.inf:
        return make_report("markov", "e32", -math.inf, -math.inf, tol, status="vacuous",
                           notes=["h vanishes identically"])
    d = max(0.0, m_tR - m_R)
    kap = K.kappa(d, t)
    dirs = (np.atleast_2d(np.asarray(v, dtype=complex)) if v is not None
            else line_directions(n, line_budget))
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    lhs, wit = (-math.inf, []) if fm.is_structurally_constant(h) else _derivative_sup(h, n, R, dirs)
    rhs = _log_mul(kap, m_R) - math.log(R)
    cb = K.eval_constants(t, d=d)
    rep = make_report("markov", "e32", lhs, rhs, tol, constants=cb.to_dict(), witnesses=wit,
                      params={"h": fm.to_dict(h), "R": R, "t": t, "d": d,
                              "directions": [_w(x) for x in dirs]})
    subs = []
    if abs(t - math.e) < 1e-12 and d > 0:
        subs.append(make_report("kappa_e_bound", "kap1", kap, 9.0 * d, 0.0, scale="value",
                                params={"d": d}))
    thr = K.nf_threshold(t)
    if d < thr:
        rad = math.sqrt(t) * R
        worst = 0
        for u in line_directions(n, line_budget):
            hl = fm.restrict_to_line(h, fm.Line.through(u)) if n > 1 else h
            zd = Z.count_zeros(hl, disk(rad))
            cnt = math.inf if zd.identically_zero else zd.count
            worst = max(worst, cnt)
        subs.append(make_report("zero_free", "iter", float(worst), 0.0, 0.0, scale="count",
                                params={"radius": rad, "d": d, "threshold": thr}))
    rep.sub_reports = subs
    if not all(s.passed for s in subs):
        rep.passed, rep.status = False, "fail"
    return rep


# --------------------------------------------------------- several graphs

def _fix_vars(g: fm.Poly, values: dict[int, complex]) -> fm.Poly:
    """Substitute fixed values for some variables of a polynomial; drop them."""
    keep = [i for i in range(g.nvars) if i not in values]
    acc: dict[tuple, complex] = {}
    for c, e in g.terms:
        coef = complex(c)
        for i, val in values.items():
            coef *= complex(val) ** e[i]
        key = tuple(e[i] for i in keep)
        acc[key] = acc.get(key, 0j) + coef
    return fm.Poly(len(keep), tuple((c, k) for k, c in acc.items() if c != 0))


def certify_te12(f_list: Sequence[fm.Expr], g: fm.Expr, r: float, t: float,
                 budgets: dict | None = None, tol: float = 1e-9,
                 other_w_points: int = 4) -> tuple[CertReport, CertReport]:
    """Certify both bounds for ``g_Phi(z) = g(z, f_1(z), ..., f_k(z))``.

    Slice parameters ``p`` and ``q_i`` come from :func:`class_params` on
    ``(z, w_i) -> g(z, ..., w_i, ...)`` with the other ``w_j`` sampled in
    ``D_{3 M_j2}``.  With a single function the slice is ``g`` itself, so
    the call, and hence every number, is the one the main theorem uses.
    """
    b = _budgets(budgets)
    k = len(f_list)
    if k == 0:
        raise ValueError("need at least one function")
    if any(fi.nvars != 1 for fi in f_list):
        raise fm.ArityError("the functions f_i must be univariate")
    if g.nvars != k + 1:
        raise fm.ArityError(f"g must have {k + 1} variables")
    if k > 1 and not isinstance(g, fm.Poly):
        raise TypeError("several graphs are supported for polynomial g only")
    t = K._check_t(t)
    growth = []
    notes = []
    for i, fi in enumerate(f_list):
        ok, gd = check_admissibility(fi, r, t)
        if not ok:
            notes.append(f"f_{i + 1} is not admissible")
        growth.append(gd)
    params = {"f_list": [fm.to_dict(fi) for fi in f_list], "g": fm.to_dict(g), "r": r, "t": t,
              "budgets": b}
    cb0 = K.eval_constants(t)
    if notes:
        nan = math.nan
        return tuple(make_report(nm, "e118", nan, nan, tol, status="hypothesis_not_met",
                                 params=params, notes=notes, constants=cb0.to_dict())
                     for nm in ("te12_sup", "te12_growth"))
    Ns = []
    for fi, gd in zip(f_list, growth):
        n_gd = n_f_quantity(fi, r, t, line_budget=b["nf_line_budget"], s_grid=b["nf_s_grid"],
                            admissibility=gd)
        Ns.append(n_gd.N_f)
    order = sorted(range(k), key=lambda i: (Ns[i], i))
    p = 0.0
    qs = [0.0] * k
    slices_used = []
    for i in range(k):
        others = [j for j in range(k) if j != i]
        pts = [_disk_points(3.0 * math.exp(growth[j].M2_log), other_w_points) for j in others]
        for combo in itertools.product(*pts) if others else [()]:
            if others:
                sl = _fix_vars(g, {1 + j: w for j, w in zip(others, combo)})
            else:
                sl = g
            cp = class_params(sl, r, t, growth[i].M2_log, line_budget=b["line_budget"],
                              w_budget=b["w_budget"], z_budget=b["z_budget"],
                              max_rounds=b["max_rounds"])
            p = max(p, cp.p)
            qs[i] = max(qs[i], cp.q)
            slices_used.append({"i": i, "fixed": [complex(w) for w in combo],
                                "p": cp.p, "q": cp.q})
    cs = [K.c_growth(t, growth[i].M1_log, growth[i].M2_log) for i in order]
    ps = [p]
    for j in range(1, k + 1):
        ps.append(cs[j - 1] * (ps[j - 1] + qs[order[j - 1]]))
    thr = K.nf_threshold(t)
    hyp = all(ps[j] <= thr * Ns[order[j]] + 1e-12 for j in range(k))
    status = None if hyp else "hypothesis_not_met"
    gphi = fm.graph_restriction(g, list(f_list))
    if not hyp and is_identically_zero(gphi, disk(t * r)):
        status = "degenerate"
    params.update({"N": Ns, "order": order, "p": p, "q": qs, "recursion": ps, "c": cs,
                   "slices": slices_used})
    cb = cb0.to_dict()
    m_r = log_max(gphi, r)
    m_tr = log_max(gphi, t * r)
    blocks = [disk(r)] + [disk(math.exp(gd.M2_log)) for gd in growth]
    sup = max_modulus_product(g, blocks, samples=b["sup_samples"])
    rep1 = make_report("te12_sup", "e118", sup.log_value, sum(ps[1:]) + m_r, tol, status=status,
                       params=params, constants=cb, witnesses=[_w(sup.witness)],
                       notes=["p_j uses c(M_1, M_2, t) of the j-th function in N-order"])
    rep2 = _increment_report("te12_growth", "e118", m_r, m_tr, ps[-1], tol, status=status,
                             params=params, constants=cb)
    return rep1, rep2


# ------------------------------------------------------- entire functions

def certify_te13_instance(f: fm.Expr, g: fm.Expr, n_j: float, r_j: float, eps_j: float,
                          rho: float, C_rho: float, tol: float = 1e-9,
                          budgets: dict | None = None, pq: tuple[float, float] | None = None,
                          r_grid: Sequence[float] | None = None, omega: CellSet | None = None,
                          c1: float = 9.0, c3: float = 5.0) -> list[CertReport]:
    """Check items (a)-(f) at one supplied sequence element ``(n_j, r_j, eps_j)``.

    The class is taken at radius ``e r_j`` with ``t = e`` and
    ``M2 = M_f(e^2 r_j)``; the hypothesis is ``p <= n_j``.  Item (e) has no
    explicit constant, so its report is diagnostic and records the smallest
    ``c2`` that would make it hold.
    """
    if r_j < 1:
        raise K.ParameterRangeError(f"r_j = {r_j!r} violates r_j ≥ 1")
    b = _budgets(budgets)
    e = math.e
    n = f.nvars
    M2_log = log_max(f, e * e * r_j)
    if pq is not None:
        p, q, cpd = float(pq[0]), float(pq[1]), None
    elif isinstance(g, fm.ExpPoly):
        cp = class_params_exp_poly(g, r_j, f)
        p, q, cpd = cp.p, cp.q, cp.to_dict()
    else:
        cp = class_params(g, e * r_j, e, M2_log, line_budget=b["line_budget"],
                          w_budget=b["w_budget"], z_budget=b["z_budget"],
                          max_rounds=b["max_rounds"])
        p, q, cpd = cp.p, cp.q, cp.to_dict()
    Kc = C_rho * n_j ** (1.0 + eps_j) * max(p, q)
    hyp = p <= n_j + 1e-12
    status = None if hyp else "hypothesis_not_met"
    params = {"f": fm.to_dict(f), "g": fm.to_dict(g), "n_j": n_j, "r_j": r_j, "eps_j": eps_j,
              "rho": rho, "C_rho": C_rho, "p": p, "q": q, "K": Kc, "M2_log": M2_log,
              "class_params": cpd, "c1": c1, "c3": c3}
    consts = {"c1": c1, "c3": c3, "C_rho": C_rho, "K": Kc}
    gf = fm.graph_restriction(g, f)
    rs = sorted({float(x) for x in (r_grid if r_grid is not None
                                     else np.geomspace(1.0, r_j, 5))})
    if rs[0] < 1 or rs[-1] > r_j * (1 + 1e-12):
        raise ValueError("radii must lie in [1, r_j]")
    m1 = log_max(gf, 1.0)
    out = []

    sup = max_modulus_product(g, [_region(n, 1.0), disk(1.0)], samples=b["sup_samples"])
    out.append(make_report("te13_a", "te13a", sup.log_value, Kc * math.log(r_j) + m1, tol,
                           status=status, params=params, constants=consts,
                           witnesses=[_w(sup.witness)]))
    subs = [make_report("te13_b_r", "te13b", log_max(gf, x), Kc * math.log(x) + m1, tol,
                        status=status, params={"r": x}) for x in rs]
    out.append(_worst("te13_b", "te13b", subs, tol, status=status, params=params,
                      constants=consts))
    subs = [_increment_report("te13_c_r", "te13c", log_max(gf, x), log_max(gf, e * x), Kc, tol,
                              status=status, params={"r": x}) for x in rs]
    out.append(_worst("te13_c", "te13c", subs, tol, status=status, params=params,
                      constants=consts))
    dirs = line_directions(n, b["v_grid"])
    subs = []
    for x in rs:
        lhs, wit = _derivative_sup(gf, n, x, dirs)
        subs.append(make_report("te13_d_r", "te13d", lhs,
                                _log_mul(c1 * Kc, log_max(gf, x)) - math.log(x), tol,
                                status=status, params={"r": x}, witnesses=wit))
    out.append(_worst("te13_d", "te13d", subs, tol, status=status, params=params,
                      constants=consts))

    if omega is None:
        omega = grid_cells_in_ball(n, 1.0, 0.25 if n == 1 else 0.5)
    omega.validate()
    lam = omega.measure_ratio()
    lhs = log_max(gf, omega.s, omega.center)
    sup_om, wit = _sup_on_set(gf, omega)
    factor = Kc * math.log(8.0 / lam)
    need = (lhs - sup_om) / factor if factor > 0 else math.inf
    out.append(make_report("te13_e", "te13e", lhs, sup_om, tol, status="diagnostic",
                           params={**params, "omega": omega.to_dict(), "lambda": lam,
                                   "required_c2": need},
                           witnesses=[wit] if wit else [], constants=consts,
                           notes=["no explicit c2 is available; reporting the smallest c2 "
                                  "compatible with the sampled data"]))
    if n == 1:
        zd = Z.count_zeros(gf, disk(rs[-1]))
        cnt = math.inf if zd.identically_zero else float(zd.count)
        out.append(make_report("te13_f", "te13f", cnt, c3 * Kc, tol, status=status,
                               scale="count", params={**params, "r": rs[-1]},
                               constants=consts))
    return out


@dataclass
class ProbeReport:
    """Diagnostic output: sampled data with no pass/fail decision."""

    name: str
    paper_tag: str
    status: str
    data: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        from .reports import jsonable
        return jsonable({"name": self.name, "paper_tag": self.paper_tag,
                         "status": self.status, "data": self.data, "notes": self.notes})


def _is_polynomial(f: fm.Expr) -> bool:
    if isinstance(f, fm.Poly):
        return True
    return isinstance(f, fm.ExpPoly) and f.exp_type == 0


def probe_te14_condition(f: fm.Expr, rho: float, t_grid: Sequence[float]) -> ProbeReport:
    """Sample the growth-regularity conditions along ``r = e^t``.

    Condition (I) (finite order) is the ratio
    ``[m(e^a r) - m(e^-a r) + rho e^{rho t}] / [m(e^-a r) - m(e^-2a r)]``
    with ``a = min(1, ln(1 + 1/rho))``; the running maximum of its tail is
    reported.  Condition (II) (infinite order) is ``t^2 (1/ln phi(t))'`` with
    ``phi(t) = m_f(e^t)``, by finite differences.
    """
    if _is_polynomial(f):
        return ProbeReport("te14_probe", "te14", "excluded",
                           notes=["f is a polynomial; the conditions concern "
                                  "nonpolynomial entire functions"])
    ts = np.asarray(sorted(float(x) for x in t_grid))
    data: dict = {"t": ts.tolist(), "rho": rho}
    notes = ["limits are not decidable from finitely many samples"]
    m = lambda x: log_max(f, float(x))  # noqa: E731
    if math.isfinite(rho):
        a = K.alpha_rho(rho)
        ratios = []
        for tt in ts:
            r = math.exp(tt)
            num = m(math.exp(a) * r) - m(math.exp(-a) * r) + rho * math.exp(rho * tt)
            den = m(math.exp(-a) * r) - m(math.exp(-2 * a) * r)
            ratios.append(num / den if den > 0 else math.inf)
        ratios = np.asarray(ratios)
        tail = np.maximum.accumulate(ratios[::-1])[::-1]
        data.update({"alpha_rho": a, "condition_I_ratio": ratios.tolist(),
                     "condition_I_tail_max": tail.tolist()})
    phi = np.array([m(math.exp(tt)) for tt in ts])
    with np.errstate(divide="ignore", invalid="ignore"):
        lnphi = np.where(phi > 0, np.log(np.where(phi > 0, phi, 1.0)), np.nan)
        psi = 1.0 / lnphi
    if ts.size >= 2:
        dpsi = np.gradient(psi, ts)
        data["condition_II_values"] = (ts ** 2 * dpsi).tolist()
    data["phi"] = phi.tolist()
    return ProbeReport("te14_probe", "te14", "diagnostic", data, notes)


# --------------------------------------------------- homogeneous example

def ex1_chain(d: int) -> CertReport:
    """``c(M1, M2, 9) < 87 ln(510 * 81^d)`` for homogeneous ``f`` of degree ``d``.

    For such ``f`` the ratio ``M2/M1 = 81^d`` exactly, so the left side is
    ``a2(9) ln(a1(9) 81^d)``.
    """
    lhs = K.a2(9.0) * (math.log(K.a1(9.0)) + d * math.log(81.0))
    rhs = K.C1_EX1 * (math.log(K.C2_EX1) + d * math.log(81.0))
    return make_report("ex1_constant_chain", "eq21", lhs, rhs, 0.0, scale="value",
                       params={"d": d}, constants=K.eval_constants(9.0).to_dict())


def _homogeneous_degree(f: fm.Expr) -> int:
    if not (isinstance(f, fm.Poly) and f.is_homogeneous and f.degree >= 1):
        raise ValueError("f must be a homogeneous polynomial of degree ≥ 1")
    return f.degree


def certify_example_ex1(f: fm.Expr, g: fm.Expr, r: float = 1.0, k: int | None = None,
                        l: int | None = None, tol: float = 1e-9,
                        budgets: dict | None = None) -> list[CertReport]:
    """The explicit constant ``81^{87 (d+2)(p+q)}`` for homogeneous ``f`` at ``t = 9``.

    With a bidegree ``(k, l)`` the class parameters are the Bernstein values
    ``p = k ln 9``, ``q = l``; otherwise they are sampled.
    """
    d = _homogeneous_degree(f)
    pq = (k * math.log(9.0), float(l)) if k is not None and l is not None else None
    su = te1_setup(f, g, r, 9.0, budgets, pq)
    b = _budgets(budgets)
    hyp = su.p <= math.log(5.0 / 3.0) * d + 1e-12
    status = None if hyp else ("degenerate" if su.gf_zero else "hypothesis_not_met")
    notes = list(su.notes)
    if status == "degenerate":
        notes.append(DEGENERATE_NOTE)
    bound = 87.0 * (d + 2) * (su.p + su.q) * math.log(81.0)
    m_r = log_max(su.gf, r)
    m_tr = log_max(su.gf, 9.0 * r)
    sup = _sup_graph_box(su, b["sup_samples"])
    params = {**su.params, "d": d, "k": k, "l": l}
    return [
        ex1_chain(d),
        make_report("ex1_sup", "eq22", sup.log_value, bound + m_r, tol, status=status,
                    params=params, constants=su.constants, notes=notes,
                    witnesses=[_w(sup.witness)]),
        _increment_report("ex1_growth", "eq22", m_r, m_tr, bound, tol, status=status,
                          params=params, constants=su.constants, notes=list(notes)),
    ]


def sharpness_witness(d: int, n: int = 1, r: float = 1.0, f: fm.Expr | None = None,
                      samples: int = 4096) -> CertReport:
    """The ratio ``sup_{B_r x D_{M2}} ln|w^d| - m_{g_f}(r)`` against its bracket.

    For ``f = z_1^d`` it equals ``d^2 ln 9``; the report checks it lies in
    ``[ln 9 d^2, 348 ln 9 (d + 2) d]``.
    """
    f = f if f is not None else fm.monomial([d] + [0] * (n - 1))
    d = _homogeneous_degree(f)
    n = f.nvars
    g = fm.monomial([0] * n + [d])
    M2 = log_max(f, 9.0 * r)
    sup = max_modulus_product(g, [_region(n, r), disk(math.exp(M2))], samples=samples)
    gf = fm.graph_restriction(g, f)
    ratio = sup.log_value - log_max(gf, r)
    lo = math.log(9.0) * d * d
    hi = 348.0 * math.log(9.0) * (d + 2) * d
    rep = make_report("sharpness_ratio", "q24", ratio, hi, 1e-9, scale="value",
                      params={"d": d, "n": n, "r": r, "expected": lo, "bracket": [lo, hi]},
                      witnesses=[_w(sup.witness)])
    low = make_report("sharpness_lower", "q24", lo, ratio, 1e-6, scale="value")
    rep.sub_reports = [low]
    if not low.passed:
        rep.passed, rep.status = False, "fail"
    return rep


# ------------------------------------------------------- geometric steps

def certify_te2_instance(F: fm.Expr, t: float, M: float | None = None, y: complex = 0j,
                         s: float | None = None, rouche_samples: int = 20,
                         seed: int = 0) -> tuple[list[CertReport], "G.GeometryWitness"]:
    """Separated line-graph intersections for ``F`` normalised on ``D_t``.

    Reports: the separation of at least ``N_F(t)`` intersection points
    (log scale), the critical-point cap ``n_{F'}(1) < lambda(t)``, the good
    circle ``min_{S_l} |F_c| >= 2 r0`` and the Rouche-type count stability
    at that level for random ``|a| <= 2 r0``.
    """
    t = K._check_t(t)
    mt = log_max(F, t)
    if mt > 1e-12:
        raise K.ParameterRangeError(f"M_F(t) = e^{mt:.6g} violates M_F(t) ≤ 1")
    if M is None:
        M = math.exp(log_max(F, 1.0 / t))
    lr0 = K.log_r0(t, M)
    if s is None:
        s = math.exp(lr0) / 3.0
    cb = K.eval_constants(t, M=M).to_dict()
    w = G.line_intersections(F, t, y, s, M=M)
    params = {"F": fm.to_dict(F), "t": t, "M": M, "y": complex(y), "s": s}
    reps = []
    rep = make_report("te2_separation", "te2", math.log(w.separation_threshold),
                      math.log(w.min_pairwise_distance) if math.isfinite(w.min_pairwise_distance)
                      else math.inf, 0.0, params=params, constants=cb,
                      witnesses=[[p] for p in w.intersection_points])
    cnt = make_report("te2_point_count", "te2", float(w.N_F), float(len(w.intersection_points)),
                      0.0, scale="count")
    rep.sub_reports = [cnt]
    if not cnt.passed:
        rep.passed, rep.status = False, "fail"
    if rep.margin_log <= 0:  # strict separation
        rep.passed, rep.status = False, "fail"
    reps.append(rep)
    zd = Z.count_zeros(fm.diff(F, 0), disk(1.0))
    n_crit = math.inf if zd.identically_zero else float(zd.count)
    lam = K.lambda_t(t, M)
    le1 = make_report("critical_cap", "le1", n_crit, lam, 0.0, scale="count", params=params,
                      constants=cb)
    if not n_crit < lam:
        le1.passed, le1.status = False, "fail"
    reps.append(le1)
    F_c = F - w.c
    gc = G.good_circle(F_c, t, M)
    reps.append(make_report("good_circle", "e213", gc.threshold_log, gc.min_modulus_log, 0.0,
                            params={**params, "level": gc.level, "c": w.c}, constants=cb,
                            witnesses=[[gc.witness]]))
    rng = np.random.default_rng(seed)
    base = Z.count_zeros(F_c, disk(gc.level)).count
    worst = 0.0
    for _ in range(rouche_samples):
        rad = 2.0 * math.exp(lr0) * math.sqrt(rng.uniform())
        a = rad * np.exp(2j * np.pi * rng.uniform())
        worst = max(worst, abs(Z.count_zeros(F_c - a, disk(gc.level)).count - base))
    reps.append(make_report("rouche_stability", "e214", worst, 0.0, 0.0, scale="count",
                            params={**params, "level": gc.level, "samples": rouche_samples,
                                    "seed": seed, "base_count": base}))
    return reps, w


def certify_cartan(f: fm.Expr, r: float, t: float, H: float | None = None,
                   samples: int = 4096) -> list[CertReport]:
    """Cartan lower bound off exceptional disks (``R = t r`` specialisation).

    ``H`` defaults to ``(sqrt t - 1) / (4 t^{3/2})``, the value that leaves
    a circle ``S_l``, ``l in [r/sqrt t, r]``, free of disks.  Reports the
    sampled lower bound, the radius cap, the zero-count cap and the good
    circle level.
    """
    t = K._check_t(t)
    if H is None:
        H = (math.sqrt(t) - 1.0) / (4.0 * t ** 1.5)
    cb = K.eval_constants(t, H=H).to_dict()
    params = {"f": fm.to_dict(f), "r": r, "t": t, "H": H, "samples": samples}
    try:
        cov = G.cartan_cover_cart2(f, r, t, H, samples)
    except G.GeometryError as exc:
        pl = exc.payload
        if "zeros" in pl:
            return [make_report("cartan_zero_cap", "ca6", float(pl["zeros"]), float(pl["cap"]),
                                1e-9, scale="count", status="fail", params=params,
                                notes=[str(exc)])]
        return [make_report("cartan_lower_bound", "ca4", pl.get("bound", math.nan),
                            pl.get("value", math.nan), 0.0, status="fail", params=params,
                            constants=cb, witnesses=[[pl.get("point", 0j)]], notes=[str(exc)])]
    reps = [
        make_report("cartan_lower_bound", "ca4", cov.lower_bound_log, cov.min_sampled_log, 0.0,
                    params={**params, "cover": cov.to_dict()}, constants=cb,
                    notes=[f"{cov.violations} violating samples of {cov.samples_checked}"]),
        make_report("cartan_radius_cap", "cart2", cov.radius_sum, cov.radius_cap, 0.0,
                    scale="value", params=params),
        make_report("cartan_zero_cap", "ca6", float(cov.zero_count), cov.params["zero_cap"],
                    1e-9, scale="count", params=params),
    ]
    if cov.violations:
        reps[0].passed, reps[0].status = False, "fail"
    # a circle S_l, r/sqrt t <= l <= r, avoiding every disk
    levels = np.linspace(r / math.sqrt(t), r, 257)
    free = [l for l in levels
            if all(abs(abs(z) - l) >= rho for z, rho in cov.disks)]
    if free:
        l = float(free[0])
        mm = G.min_modulus_circle(f, l).log_value
        reps.append(make_report("cartan_good_circle", "cart3", cov.lower_bound_log, mm, 1e-9,
                                params={**params, "level": l}))
    else:
        reps.append(make_report("cartan_good_circle", "cart3", math.nan, math.nan, 0.0,
                                status="fail", params=params,
                                notes=["no disk-free circle at grid resolution"]))
    return reps


def certify_cartan_cover(h: fm.Expr, R: float, alpha: float, beta: float, H: float,
                         d_exp: float = 1.0, samples: int = 4096) -> CertReport:
    """The general Cartan lower bound on ``D_{alpha R}`` off the exceptional disks."""
    params = {"h": fm.to_dict(h), "R": R, "alpha": alpha, "beta": beta, "H": H, "d": d_exp,
              "samples": samples}
    try:
        cov = G.cartan_cover(h, R, alpha, beta, H, d_exp, samples)
    except G.GeometryError as exc:
        pl = exc.payload
        return make_report("cartan_cover", "ca1", pl["bound"], pl["value"], 0.0, status="fail",
                           params=params, witnesses=[[pl["point"]]], notes=[str(exc)])
    rep = make_report("cartan_cover", "ca1", cov.lower_bound_log, cov.min_sampled_log, 0.0,
                      params={**params, "cover": cov.to_dict()},
                      notes=[f"{cov.violations} violating samples of {cov.samples_checked}"])
    rep.sub_reports = [make_report("cartan_cover_radius_cap", "cart1", cov.radius_sum,
                                   cov.radius_cap, 0.0, scale="value")]
    return rep
