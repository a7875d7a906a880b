"""Transcendence measure ``m_k(r, f)`` and flat polynomials on graphs.

``m_k(r, f)`` is the largest ``ln M_{g_f}(r)`` over polynomials ``g`` of
degree ``k`` in ``n + 1`` variables normalised by ``M_{g_f}(1) <= 1``.  A
lower bound comes from a *flat* polynomial: a nonzero ``g`` whose graph
restriction vanishes at 0 to order ``p_k + 1``; such ``g`` exists as soon as
the number of Taylor conditions ``d_{p_k, n}`` is below ``d_{k, n+1}``.

High-precision arithmetic uses :mod:`mpmath`.  Its working precision is
process-wide state, so every routine sets it through ``mp.workdps`` and
instances are meant to run one after another.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath as mp
import numpy as np
from scipy import optimize

from . import funcmodel as fm
from .modulus import log_max
from .quantities import line_directions

__all__ = [
    "TranscendenceData", "FlatPolynomial", "FlatnessError", "PolynomialInputError",
    "p_k", "d_kn", "flat_polynomial", "mk_estimate", "tau_bounds",
]

FLATNESS_TOL = 1e-10


class FlatnessError(ArithmeticError):
    """The computed kernel vector does not make ``g_f`` flat enough."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class PolynomialInputError(ValueError):
    """The construction needs a nonpolynomial ``f``."""


def p_k(k: int, n: int) -> int:
    """``floor(k^(1+1/n) / (n+2)^(1/n))`` in exact integer arithmetic."""
    if k < 0 or n < 1:
        raise ValueError("need k >= 0 and n >= 1")
    target = k ** (n + 1)
    lo, hi = 0, k * k + 1
    while lo < hi:  # largest p with p^n (n + 2) <= k^(n+1)
        mid = (lo + hi + 1) // 2
        if mid ** n * (n + 2) <= target:
            lo = mid
        else:
            hi = mid - 1
    return lo


def d_kn(k: int, n: int) -> int:
    """Dimension of the polynomials of degree ``<= k`` in ``n`` variables."""
    return math.comb(n + k, n)


@dataclass
class FlatPolynomial:
    g: fm.Poly
    verified_flatness_order: int
    k: int
    n: int
    p_k: int
    residual: float
    exact_residual: float
    free_column: int
    rank: int
    coeffs_hp: tuple = ()
    exps: tuple = ()
    residual_hp: float | None = None
    notes: list = field(default_factory=list)

    def hp_terms(self) -> list:
        """Kernel vector at the current mpmath precision, as ``(coef, exps)`` pairs."""
        return [(mp.mpc(mp.mpf(re), mp.mpf(im)), e) for (re, im), e in zip(self.coeffs_hp,
                                                                           self.exps)]

    def to_dict(self) -> dict:
        return {"g": fm.to_dict(self.g), "verified_flatness_order": self.verified_flatness_order,
                "k": self.k, "n": self.n, "p_k": self.p_k, "residual": self.residual,
                "residual_hp": self.residual_hp, "exact_residual": self.exact_residual,
                "free_column": self.free_column, "rank": self.rank, "notes": list(self.notes)}


@dataclass
class TranscendenceData:
    k: int
    n: int
    p_k: int
    d_k_np1: int
    d_pk_n: int
    mk_lower: float
    mk_sampled: float
    mk_flat: float | None = None
    tau_lower_trend: list = field(default_factory=list)
    tau_upper_trend: list = field(default_factory=list)
    trend_target: float | None = None
    trend_ok: bool | None = None
    per_k: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


# ------------------------------------------------------------ series

def _indices(n: int, deg: int) -> list[tuple]:
    """Multi-indices of total degree ``<= deg``, graded then lexicographic."""
    out = []
    for d in range(deg + 1):
        for a in itertools.product(range(d + 1), repeat=n):
            if sum(a) == d:
                out.append(a)
    return out


def _series_mul(a: dict, b: dict, deg: int) -> dict:
    out: dict = {}
    for ka, va in a.items():
        da = sum(ka)
        for kb, vb in b.items():
            if da + sum(kb) <= deg:
                key = tuple(x + y for x, y in zip(ka, kb))
                out[key] = out.get(key, 0) + va * vb
    return out


def _poly_series(p: fm.Poly) -> dict:
    return {tuple(e): mp.mpc(c) for c, e in p.terms}


def _exp_linear_series(lin: Sequence[complex], n: int, deg: int) -> dict:
    out = {(0,) * n: mp.mpc(1)}
    for i in range(n):
        li = mp.mpc(lin[i])
        if li == 0:
            continue
        one = {}
        for m in range(deg + 1):
            e = [0] * n
            e[i] = m
            one[tuple(e)] = li ** m / mp.factorial(m)
        out = _series_mul(out, one, deg)
    return out


def _exp_series_1d(h: dict, deg: int) -> dict:
    hs = [h.get((m,), mp.mpc(0)) for m in range(deg + 1)]
    b = [mp.exp(hs[0])]
    for m in range(1, deg + 1):
        b.append(sum(j * hs[j] * b[m - j] for j in range(1, m + 1)) / m)
    return {(m,): b[m] for m in range(deg + 1)}


def _taylor(f: fm.Expr, deg: int) -> dict:
    """Taylor coefficients of ``f`` at 0 through total degree ``deg``."""
    n = f.nvars
    if isinstance(f, fm.Poly):
        return {k: v for k, v in _poly_series(f).items() if sum(k) <= deg}
    if isinstance(f, fm.ExpPoly):
        out: dict = {}
        for p, lin in f.parts:
            term = _series_mul(_poly_series(p), _exp_linear_series(lin, n, deg), deg)
            for k, v in term.items():
                out[k] = out.get(k, 0) + v
        return out
    if isinstance(f, fm.ExpOf) and n == 1:
        return _exp_series_1d(_taylor(f.inner, deg), deg)
    if isinstance(f, fm.Sum):
        out = {}
        for t in f.terms:
            for k, v in _taylor(t, deg).items():
                out[k] = out.get(k, 0) + v
        return out
    if isinstance(f, fm.Product):
        out = {(0,) * n: mp.mpc(1)}
        for t in f.factors:
            out = _series_mul(out, _taylor(t, deg), deg)
        return out
    raise NotImplementedError(f"Taylor coefficients of {type(f).__name__} nodes are not available")


def _mp_eval(f: fm.Expr, z: Sequence) -> mp.mpc:
    if isinstance(f, fm.Poly):
        acc = mp.mpc(0)
        for c, e in f.terms:
            term = mp.mpc(c)
            for zi, ei in zip(z, e):
                if ei:
                    term *= zi ** ei
            acc += term
        return acc
    if isinstance(f, fm.ExpPoly):
        return sum((_mp_eval(p, z) * mp.exp(mp.fsum(mp.mpc(l) * zi for l, zi in zip(lin, z)))
                    for p, lin in f.parts), mp.mpc(0))
    if isinstance(f, fm.ExpOf):
        return mp.exp(_mp_eval(f.inner, z))
    if isinstance(f, fm.Sum):
        return mp.fsum(_mp_eval(t, z) for t in f.terms)
    if isinstance(f, fm.Product):
        out = mp.mpc(1)
        for t in f.factors:
            out *= _mp_eval(t, z)
        return out
    raise NotImplementedError(f"cannot evaluate {type(f).__name__} in high precision")


def _is_polynomial(f: fm.Expr) -> bool:
    if isinstance(f, fm.Poly):
        return True
    if isinstance(f, fm.ExpPoly):
        return all(all(l == 0 for l in lin) for _, lin in f.parts)
    return False


# ---------------------------------------------------------- construction

def _constraint_matrix(f: fm.Expr, k: int, n: int, p: int):
    rows = _indices(n, p)
    cols = [(i, j) for i in _indices(n, k) for j in range(k + 1 - sum(i))]
    cols.sort(key=lambda c: (sum(c[0]) + c[1], c[1], c[0]))
    F = _taylor(f, p)
    powers = [{(0,) * n: mp.mpc(1)}]
    for _ in range(k):
        powers.append(_series_mul(powers[-1], F, p))
    A = mp.matrix(len(rows), len(cols))
    rindex = {a: r for r, a in enumerate(rows)}
    for c, (i, j) in enumerate(cols):
        for a, v in powers[j].items():
            key = tuple(x + y for x, y in zip(a, i))
            if sum(key) <= p:
                A[rindex[key], c] += v
    return A, rows, cols


def _pivoted_qr(A) -> tuple[list[int], list]:
    """Column order and ``|R_ii|`` of a Householder QR with column pivoting.

    Ties in the remaining column norms go to the smallest column index.
    """
    m, ncol = A.rows, A.cols
    W = [[A[i, j] for i in range(m)] for j in range(ncol)]
    perm = list(range(ncol))
    diag = []
    for step in range(min(m, ncol)):
        norms = [mp.fsum(abs(x) ** 2 for x in W[j][step:]) for j in range(step, ncol)]
        best = max(range(len(norms)), key=lambda i: (norms[i], -perm[step + i]))
        j = step + best
        W[step], W[j] = W[j], W[step]
        perm[step], perm[j] = perm[j], perm[step]
        col = W[step]
        alpha = mp.sqrt(norms[best])
        diag.append(alpha)
        if alpha == 0:
            break
        x0 = col[step]
        phase = x0 / abs(x0) if x0 != 0 else mp.mpc(1)
        v = [mp.mpc(0)] * m
        v[step] = x0 + phase * alpha
        for i in range(step + 1, m):
            v[i] = col[i]
        vn = mp.fsum(abs(x) ** 2 for x in v[step:])
        for jj in range(step, ncol):
            c = W[jj]
            dot = mp.fsum(mp.conj(v[i]) * c[i] for i in range(step, m))
            fac = 2 * dot / vn
            for i in range(step, m):
                c[i] -= fac * v[i]
    return perm, diag


def flat_polynomial(f: fm.Expr, k: int, n: int | None = None) -> FlatPolynomial:
    """A unit-norm ``g`` of degree ``<= k`` with ``g_f`` vanishing to order ``p_k + 1``.

    Columns of the Taylor-matching system are ordered by degree; the free
    column of the kernel vector is the smallest index outside the pivots of
    a column-pivoted QR factorisation, and the pivot block is solved in
    high precision.
    """
    n = f.nvars if n is None else n
    if n != f.nvars:
        raise fm.ArityError("n must match the number of variables of f")
    if _is_polynomial(f):
        raise PolynomialInputError("f is a polynomial; g_f is not guaranteed to be nonzero")
    p = p_k(k, n)
    if not d_kn(p, n) < d_kn(k, n + 1):
        raise ValueError(f"k = {k} is below k0: d_(p_k,n) = {d_kn(p, n)} is not less than "
                         f"d_(k,n+1) = {d_kn(k, n + 1)}")
    dps = 30 + 2 * p
    with mp.workdps(dps):
        A, rows, cols = _constraint_matrix(f, k, n, p)
        for i in range(A.rows):
            s = mp.sqrt(mp.fsum(abs(A[i, j]) ** 2 for j in range(A.cols)))
            if s != 0:
                for j in range(A.cols):
                    A[i, j] /= s
        piv, diag = _pivoted_qr(A)
        rank = sum(1 for d in diag if d > mp.mpf(10) ** (-dps // 2) * diag[0])
        pivots = sorted(piv[:rank])
        free = min(set(range(A.cols)) - set(pivots))
        B = mp.matrix(A.rows, rank)
        rhs = mp.matrix(A.rows, 1)
        for i in range(A.rows):
            rhs[i] = -A[i, free]
            for jj, j in enumerate(pivots):
                B[i, jj] = A[i, j]
        x = mp.lu_solve(B, rhs) if rank == A.rows else mp.qr_solve(B, rhs)[0]
        vec = [mp.mpc(0)] * A.cols
        vec[free] = mp.mpc(1)
        for jj, j in enumerate(pivots):
            vec[j] = x[jj]
        norm = mp.sqrt(mp.fsum(abs(v) ** 2 for v in vec))
        hp = [v / norm for v in vec]
        coefs = [complex(v) for v in hp]
        hp_str = tuple((mp.nstr(v.real, dps), mp.nstr(v.imag, dps)) for v in hp)
        # residual of the rounded vector against the unnormalised system
        A0, _, _ = _constraint_matrix(f, k, n, p)
        exact = max(float(abs(mp.fsum(A0[i, j] * mp.mpc(coefs[j]) for j in range(A0.cols))))
                    for i in range(A0.rows))
    exps = tuple(tuple(i) + (j,) for i, j in cols)
    g = fm.Poly(n + 1, tuple((c, e) for c, e in zip(coefs, exps) if c != 0))
    resid = _quadrature_residual(f, [(c, e) for c, e in zip(coefs, exps)], p)
    if not resid < FLATNESS_TOL:
        raise FlatnessError(f"flatness residual {resid:.3e} exceeds {FLATNESS_TOL:g}", resid)
    with mp.workdps(dps):
        hp_terms = [(mp.mpc(*c), e) for c, e in zip(hp_str, exps)]
    resid_hp = _quadrature_residual(f, hp_terms, p)
    return FlatPolynomial(g, p, k, n, p, resid, exact, free, rank, hp_str, exps, resid_hp,
                          notes=["residual: max Taylor coefficient of g_f through degree p_k "
                                 "relative to the unit coefficient norm of g",
                                 "g holds the kernel vector rounded to double; coeffs_hp keeps "
                                 "it in high precision for growth measurements"])


def _terms_eval(terms: list, z: Sequence) -> mp.mpc:
    acc = mp.mpc(0)
    for c, e in terms:
        if c == 0:
            continue
        term = mp.mpc(c)
        for zi, ei in zip(z, e):
            if ei:
                term *= zi ** ei
        acc += term
    return acc


def _quadrature_residual(f: fm.Expr, terms: list, p: int, radius: float = 0.5) -> float:
    """Largest ``|[g_f]_alpha|``, ``|alpha| <= p``, by circle/torus quadrature.

    ``terms`` lists ``(coefficient, exponents)`` of ``g``; the result is
    relative to the coefficient 2-norm.
    """
    n = f.nvars
    N = 4 * max(p, 12)  # at least 48 nodes so aliasing stays below 0.5**48
    with mp.workdps(30 + 2 * p):
        gnorm = mp.sqrt(mp.fsum(abs(mp.mpc(c)) ** 2 for c, _ in terms))
        rad = mp.mpf(radius)
        roots = [mp.expjpi(mp.mpf(2 * m) / N) for m in range(N)]
        vals = {}
        for idx in itertools.product(range(N), repeat=n):
            z = [rad * roots[m] for m in idx]
            vals[idx] = _terms_eval(terms, z + [_mp_eval(f, z)])
        worst = mp.mpf(0)
        for a in _indices(n, p):
            acc = mp.mpc(0)
            for idx, v in vals.items():
                acc += v * mp.expjpi(-mp.mpf(2 * sum(i * ai for i, ai in zip(idx, a))) / N)
            c = acc / N ** n / rad ** sum(a)
            worst = max(worst, abs(c))
        return float(worst / gnorm)


# -------------------------------------------------------------- estimates

def _mp_circle_logmax(fun, r: float, nodes: int = 512) -> float:
    """``ln max |fun|`` on ``|z| = r`` by a node scan plus bounded refinement."""
    th = 2 * np.pi * np.arange(nodes) / nodes

    def at(x):
        return float(mp.log(abs(fun(mp.mpf(r) * mp.expj(mp.mpf(float(x)))))))

    v = np.array([at(x) for x in th])
    order = np.argsort(-v, kind="stable")[:4]
    best = float(v[order[0]])
    h = 2 * np.pi / nodes
    for i in order:
        res = optimize.minimize_scalar(lambda x: -at(x), bounds=(th[i] - h, th[i] + h),
                                       method="bounded", options={"xatol": 1e-12})
        best = max(best, float(-res.fun))
    return best


def _flat_growth(f: fm.Expr, fp: FlatPolynomial, r: float) -> dict:
    """``m_{g_f}(r) - m_{g_f}(1)`` for the high-precision flat polynomial.

    For ``n >= 2`` the growth is measured on the sampled line through 0
    where ``|g_f|`` is largest on the unit ball; along any line the flat
    order forces growth at least ``p_k + 1`` from 1 to ``e``.
    """
    n = f.nvars
    with mp.workdps(30 + 2 * fp.p_k):
        terms = fp.hp_terms()
        if n == 1:
            fun = lambda z: _terms_eval(terms, [z, _mp_eval(f, [z])])  # noqa: E731
            m1 = _mp_circle_logmax(fun, 1.0)
            mr = _mp_circle_logmax(fun, r)
            return {"m_1": m1, "m_r": mr, "growth": mr - m1}
        best = None
        for v in line_directions(n, 8):
            vv = [mp.mpc(complex(x)) for x in v]

            def fun(zeta, vv=vv):
                z = [zeta * x for x in vv]
                return _terms_eval(terms, z + [_mp_eval(f, z)])

            m1 = _mp_circle_logmax(fun, 1.0, nodes=128)
            if best is None or m1 > best[1]:
                best = (v, m1, fun)
        v, m1, fun = best
        mr = _mp_circle_logmax(fun, r, nodes=128)
    return {"m_1": m1, "m_r": mr, "growth": mr - m1, "line": [complex(x) for x in v],
            "notes": ["measured on the sampled line with the largest unit-disk maximum"]}


def mk_estimate(f: fm.Expr, k: int, r: float = math.e, budget: int = 16,
                seed: int = 0, flat: FlatPolynomial | None = None) -> tuple[float, float, dict]:
    """``(mk_lower, mk_sampled, details)`` for ``m_k(r, f)``.

    ``mk_lower = (p_k + 1) ln r`` is implied by a verified flat polynomial;
    ``details["mk_flat"]`` is that polynomial's measured growth.
    ``mk_sampled`` is the best ``m_{g_f}(r) - m_{g_f}(1)`` over ``budget``
    random Gaussian polynomials.  For polynomial ``f`` no bound is produced
    (both values are NaN) and ``details`` carries the diagnostic.
    """
    if r < 1:
        raise ValueError("need r >= 1")
    n = f.nvars
    if _is_polynomial(f):
        return math.nan, math.nan, {"diagnostic": "f is a polynomial: the orders of "
                                    "transcendence both equal 1 and no flat bound applies"}
    fp = flat if flat is not None else flat_polynomial(f, k, n)
    growth = _flat_growth(f, fp, r)
    lower = (fp.p_k + 1) * math.log(r)
    rng = np.random.default_rng(seed)
    cols = [(i, j) for i in _indices(n, k) for j in range(k + 1 - sum(i))]
    best = -math.inf
    for _ in range(budget):
        c = rng.standard_normal(len(cols)) + 1j * rng.standard_normal(len(cols))
        g = fm.Poly(n + 1, tuple((complex(ci), tuple(i) + (j,)) for ci, (i, j) in zip(c, cols)))
        gf = fm.graph_restriction(g, f)
        val = log_max(gf, r) - log_max(gf, 1.0)
        best = max(best, val)
    return lower, float(best), {"mk_flat": growth["growth"], "flat": fp.to_dict(),
                                "flat_growth": growth, "samples": budget, "seed": seed}


def tau_bounds(f: fm.Expr, k_range: Sequence[int], n: int | None = None, tol: float = 0.05,
               budget: int = 8, seed: int = 0) -> TranscendenceData:
    """Trend of ``m_k(e, f) / k^(1+1/n)`` against ``1/(n+2)^(1/n)`` over ``k_range``.

    ``m_k(e, f)`` is estimated from below by the larger of the flat
    polynomial's measured growth and the random-sample estimate.
    """
    n = f.nvars if n is None else n
    ks = sorted(int(k) for k in k_range)
    target = 1.0 / (n + 2) ** (1.0 / n)
    if _is_polynomial(f):
        k = ks[-1]
        return TranscendenceData(k=k, n=n, p_k=p_k(k, n), d_k_np1=d_kn(k, n + 1),
                                 d_pk_n=d_kn(p_k(k, n), n), mk_lower=math.nan,
                                 mk_sampled=math.nan, trend_target=target,
                                 notes=["f is a polynomial: both orders of transcendence "
                                        "equal 1; no flat-polynomial bound is produced"])
    lower_trend, upper_trend, per_k = [], [], []
    last = None
    for k in ks:
        lo, sampled, det = mk_estimate(f, k, math.e, budget, seed)
        mk = max(det["mk_flat"], sampled, lo) if det.get("mk_flat") is not None else lo
        lower_trend.append((k, mk / k ** (1.0 + 1.0 / n)))
        upper_trend.append((k, mk / k ** 2))
        pk = p_k(k, n)
        per_k.append({"k": k, "p_k": pk, "d_pk_n": d_kn(pk, n), "d_k_np1": d_kn(k, n + 1),
                      "mk_lower": lo, "mk_flat": det["mk_flat"], "mk_sampled": sampled,
                      "mk": mk, "flatness_residual": det["flat"]["residual"]})
        last = (k, pk, lo, sampled, det["mk_flat"])
    k, pk, lo, sampled, flat_val = last
    ok = min(v for _, v in lower_trend) >= target - tol
    return TranscendenceData(k=k, n=n, p_k=pk, d_k_np1=d_kn(k, n + 1), d_pk_n=d_kn(pk, n),
                             mk_lower=lo, mk_sampled=sampled, mk_flat=flat_val,
                             tau_lower_trend=lower_trend, tau_upper_trend=upper_trend,
                             trend_target=target, trend_ok=bool(ok), per_k=per_k,
                             notes=["trend values are finite-k evidence, not limits"])
