"""Symbolic representation of entire functions on C^n.

Expressions form a small closed algebra: polynomials, exponential
polynomials, exponentials of expressions, sums, products, restrictions to
complex lines and to graphs, and affine changes of variable or value.
Every node can be evaluated directly or along an overflow-safe path that
returns the complex logarithm of the value.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "ArityError", "EvaluationOverflow", "Expr", "Poly", "ExpPoly", "ExpOf",
    "Sum", "Product", "LineRestrict", "GraphRestrict", "Shift", "Scale",
    "Line", "poly", "poly1d", "var", "const", "monomial", "evaluate",
    "log_abs", "clog", "diff", "directional_derivative", "restrict_to_line",
    "graph_restriction", "shift", "to_dict", "from_dict", "dumps", "loads",
    "save", "load", "is_structurally_zero", "is_structurally_constant",
]

_CHUNK = 1 << 22  # max complex entries per intermediate block


class ArityError(ValueError):
    """Dimension of a point or sub-expression does not match."""


class EvaluationOverflow(OverflowError):
    """Direct evaluation overflowed; callers should use :func:`log_abs`."""


class Expr:
    """Base class for the expression nodes.  Supports ``+ - *`` and calls."""

    nvars: int

    def __call__(self, z):
        return evaluate(self, z)

    def _coerce(self, other) -> "Expr":
        if isinstance(other, Expr):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return const(complex(other), self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if isinstance(self, Poly) and isinstance(other, Poly):
            return _poly_add(self, other)
        return Sum((self, other))

    __radd__ = __add__

    def __neg__(self):
        if isinstance(self, Poly):
            return _poly_scale(self, -1.0)
        return Scale(self, 1.0, -1.0)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if isinstance(self, Poly) and isinstance(other, Poly):
            return _poly_mul(self, other)
        return Product((self, other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        if isinstance(self, Poly):
            return _poly_pow(self, int(k))
        if k == 0:
            return const(1.0, self.nvars)
        return Product((self,) * int(k))


# --------------------------------------------------------------------- nodes

@dataclass(frozen=True)
class Poly(Expr):
    """Polynomial ``sum c * z**e`` with terms ``((c, e), ...)``."""

    nvars: int
    terms: tuple = ()

    def __post_init__(self):
        if self.nvars < 1:
            raise ArityError("nvars must be >= 1")
        merged: dict[tuple, complex] = {}
        for c, e in self.terms:
            e = tuple(int(x) for x in e)
            if len(e) != self.nvars:
                raise ArityError(f"exponent {e} does not have {self.nvars} entries")
            if any(x < 0 for x in e):
                raise ValueError("exponents must be nonnegative")
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("coefficients must be finite")
            merged[e] = merged.get(e, 0j) + c
        clean = tuple(sorted(((c, e) for e, c in merged.items() if c != 0),
                             key=lambda ce: (sum(ce[1]), ce[1])))
        object.__setattr__(self, "terms", clean)

    @cached_property
    def coeffs(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=complex)

    @cached_property
    def exps(self) -> np.ndarray:
        return np.array([e for _, e in self.terms], dtype=int).reshape(-1, self.nvars)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return int(self.exps.sum(axis=1).max()) if self.terms else -1

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return self.degree <= 0

    @property
    def is_homogeneous(self) -> bool:
        return bool(self.terms) and len(set(self.exps.sum(axis=1))) == 1

    def coefficient(self, e: Sequence[int]) -> complex:
        for c, ee in self.terms:
            if ee == tuple(e):
                return c
        return 0j

    def as_dict(self) -> dict[tuple, complex]:
        return {e: c for c, e in self.terms}

    def univariate_coeffs(self) -> np.ndarray:
        """Ascending coefficient array of a univariate polynomial."""
        if self.nvars != 1:
            raise ArityError("univariate_coeffs needs nvars == 1")
        out = np.zeros(max(self.degree, 0) + 1, dtype=complex)
        for c, (k,) in self.terms:
            out[k] = c
        return out


@dataclass(frozen=True)
class ExpPoly(Expr):
    """Exponential polynomial ``sum_j p_j(z) * exp(l_j . z)``.

    ``parts`` holds pairs ``(Poly, lin)`` where ``lin`` is a tuple of
    ``nvars`` complex numbers.
    """

    nvars: int
    parts: tuple = ()

    def __post_init__(self):
        clean = []
        for p, lin in self.parts:
            lin = tuple(complex(x) for x in lin)
            if p.nvars != self.nvars or len(lin) != self.nvars:
                raise ArityError("exponential polynomial part has the wrong arity")
            if not p.is_zero:
                clean.append((p, lin))
        object.__setattr__(self, "parts", tuple(clean))

    @property
    def degree_sum(self) -> int:
        """sum_j (1 + deg p_j)."""
        return sum(1 + p.degree for p, _ in self.parts)

    @property
    def exp_type(self) -> float:
        """max_j ||l_j||_2."""
        return max((float(np.linalg.norm(lin)) for _, lin in self.parts), default=0.0)


@dataclass(frozen=True)
class ExpOf(Expr):
    inner: Expr

    @property
    def nvars(self) -> int:
        return self.inner.nvars


@dataclass(frozen=True)
class Sum(Expr):
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("empty Sum")
        if len({t.nvars for t in self.terms}) != 1:
            raise ArityError("Sum terms have different arities")

    @property
    def nvars(self) -> int:
        return self.terms[0].nvars


@dataclass(frozen=True)
class Product(Expr):
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("empty Product")
        if len({t.nvars for t in self.factors}) != 1:
            raise ArityError("Product factors have different arities")

    @property
    def nvars(self) -> int:
        return self.factors[0].nvars


@dataclass(frozen=True)
class Line:
    """Complex line through the origin spanned by a unit vector."""

    direction: tuple

    def __post_init__(self):
        v = tuple(complex(x) for x in np.atleast_1d(np.asarray(self.direction, dtype=complex)))
        nrm = math.sqrt(sum(abs(x) ** 2 for x in v))
        if abs(nrm - 1.0) > 1e-12:
            raise ValueError(f"line direction must have unit norm (got {nrm!r})")
        object.__setattr__(self, "direction", v)

    @classmethod
    def through(cls, v) -> "Line":
        v = np.atleast_1d(np.asarray(v, dtype=complex))
        return cls(tuple(v / np.linalg.norm(v)))

    @property
    def dim(self) -> int:
        return len(self.direction)


@dataclass(frozen=True)
class LineRestrict(Expr):
    base: Expr
    direction: tuple

    def __post_init__(self):
        line = Line(self.direction)
        if line.dim != self.base.nvars:
            raise ArityError("line direction and base expression disagree in dimension")
        object.__setattr__(self, "direction", line.direction)

    nvars = 1


@dataclass(frozen=True)
class GraphRestrict(Expr):
    """``z -> g(z, f_1(z), ..., f_k(z))``."""

    g: Expr
    fs: tuple

    def __post_init__(self):
        fs = tuple(self.fs) if isinstance(self.fs, (tuple, list)) else (self.fs,)
        object.__setattr__(self, "fs", fs)
        if not fs:
            raise ValueError("graph restriction needs at least one function")
        n = fs[0].nvars
        if any(f.nvars != n for f in fs) or self.g.nvars != n + len(fs):
            raise ArityError(
                f"graph restriction arity mismatch: g has {self.g.nvars} variables, "
                f"expected {n + len(fs)}")

    @property
    def nvars(self) -> int:
        return self.fs[0].nvars


@dataclass(frozen=True)
class Shift(Expr):
    """``z -> base(z + offset)``."""

    base: Expr
    offset: tuple

    def __post_init__(self):
        off = tuple(complex(x) for x in np.atleast_1d(np.asarray(self.offset, dtype=complex)))
        if len(off) != self.base.nvars:
            raise ArityError("shift offset has the wrong dimension")
        object.__setattr__(self, "offset", off)

    @property
    def nvars(self) -> int:
        return self.base.nvars


@dataclass(frozen=True)
class Scale(Expr):
    """``z -> value_scale * base(var_scale * z)``."""

    base: Expr
    var_scale: complex = 1.0
    value_scale: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "var_scale", complex(self.var_scale))
        object.__setattr__(self, "value_scale", complex(self.value_scale))

    @property
    def nvars(self) -> int:
        return self.base.nvars


# ------------------------------------------------------------- constructors

def poly(coeffs: Mapping[Sequence[int], complex] | Iterable, nvars: int | None = None) -> Poly:
    """Build a polynomial from ``{exponents: coefficient}`` or ``[(c, exps)]``."""
    if isinstance(coeffs, Mapping):
        items = [(c, tuple(e) if isinstance(e, (tuple, list)) else (e,)) for e, c in coeffs.items()]
    else:
        items = [(c, tuple(e) if isinstance(e, (tuple, list)) else (e,)) for c, e in coeffs]
    if nvars is None:
        if not items:
            raise ValueError("nvars is required for the zero polynomial")
        nvars = len(items[0][1])
    return Poly(nvars, tuple(items))


def poly1d(coeffs: Sequence[complex]) -> Poly:
    """Univariate polynomial from ascending coefficients."""
    return Poly(1, tuple((c, (k,)) for k, c in enumerate(coeffs)))


def monomial(exps: Sequence[int], coeff: complex = 1.0) -> Poly:
    return Poly(len(exps), ((coeff, tuple(exps)),))


def var(i: int, nvars: int) -> Poly:
    e = [0] * nvars
    e[i] = 1
    return monomial(e)


def const(c: complex, nvars: int) -> Poly:
    return Poly(nvars, ((complex(c), (0,) * nvars),))


def _poly_add(a: Poly, b: Poly) -> Poly:
    if a.nvars != b.nvars:
        raise ArityError("cannot add polynomials of different arity")
    return Poly(a.nvars, a.terms + b.terms)


def _poly_scale(a: Poly, s: complex) -> Poly:
    return Poly(a.nvars, tuple((c * s, e) for c, e in a.terms))


def _poly_mul(a: Poly, b: Poly) -> Poly:
    if a.nvars != b.nvars:
        raise ArityError("cannot multiply polynomials of different arity")
    out: dict[tuple, complex] = {}
    for c1, e1 in a.terms:
        for c2, e2 in b.terms:
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0j) + c1 * c2
    return Poly(a.nvars, tuple((c, e) for e, c in out.items()))


def _poly_pow(a: Poly, k: int) -> Poly:
    result = const(1.0, a.nvars)
    base = a
    while k:
        if k & 1:
            result = _poly_mul(result, base)
        k >>= 1
        if k:
            base = _poly_mul(base, base)
    return result


# ------------------------------------------------------------ point handling

def _as_points(z, nvars: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=complex)
    if nvars == 1:
        if arr.ndim == 0:
            return arr.reshape(1, 1), True
        if arr.ndim == 1:
            return arr.reshape(-1, 1), False
    if arr.ndim == 1:
        if arr.shape[0] != nvars:
            raise ArityError(f"point has dimension {arr.shape[0]}, expected {nvars}")
        return arr.reshape(1, nvars), True
    if arr.ndim != 2 or arr.shape[1] != nvars:
        raise ArityError(f"points must have shape (N, {nvars}), got {arr.shape}")
    return arr, False


def _lse(L: np.ndarray, axis: int = 0) -> np.ndarray:
    """Complex log-sum-exp along ``axis``."""
    re = L.real
    with np.errstate(invalid="ignore"):
        m = np.max(re, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(invalid="ignore", over="ignore"):
        s = np.sum(np.exp(L - m), axis=axis)
    with np.errstate(divide="ignore"):
        return np.log(s) + np.squeeze(m, axis=axis)


# --------------------------------------------------------------- evaluation

def _poly_eval(p: Poly, pts: np.ndarray) -> np.ndarray:
    N = pts.shape[0]
    if p.is_zero:
        return np.zeros(N, dtype=complex)
    K = len(p.terms)
    out = np.empty(N, dtype=complex)
    step = max(1, _CHUNK // max(K, 1))
    exps = p.exps
    for lo in range(0, N, step):
        blk = pts[lo:lo + step]
        vals = np.ones((blk.shape[0], K), dtype=complex)
        for i in range(p.nvars):
            col = exps[:, i]
            dmax = int(col.max())
            if dmax == 0:
                continue
            table = blk[:, i:i + 1] ** np.arange(dmax + 1)
            vals *= table[:, col]
        out[lo:lo + step] = vals @ p.coeffs
    return out


def _poly_clog(p: Poly, pts: np.ndarray) -> np.ndarray:
    N = pts.shape[0]
    if p.is_zero:
        return np.full(N, -np.inf, dtype=complex)
    K = len(p.terms)
    out = np.empty(N, dtype=complex)
    step = max(1, _CHUNK // max(K, 1))
    exps = p.exps
    logc = np.log(p.coeffs)
    with np.errstate(divide="ignore", invalid="ignore"):
        logz = np.log(pts)
    for lo in range(0, N, step):
        blk = logz[lo:lo + step]
        L = np.broadcast_to(logc, (blk.shape[0], K)).copy()
        for i in range(p.nvars):
            col = exps[:, i]
            if not col.any():
                continue
            with np.errstate(invalid="ignore"):
                contrib = np.where(col > 0, col * blk[:, i:i + 1], 0.0)
            L += contrib
        out[lo:lo + step] = _lse(L, axis=1)
    return out


def _eval(f: Expr, pts: np.ndarray) -> np.ndarray:
    if isinstance(f, Poly):
        return _poly_eval(f, pts)
    if isinstance(f, ExpPoly):
        out = np.zeros(pts.shape[0], dtype=complex)
        for p, lin in f.parts:
            out += _poly_eval(p, pts) * np.exp(pts @ np.asarray(lin))
        return out
    if isinstance(f, ExpOf):
        return np.exp(_eval(f.inner, pts))
    if isinstance(f, Sum):
        return sum(_eval(t, pts) for t in f.terms)
    if isinstance(f, Product):
        out = _eval(f.factors[0], pts)
        for t in f.factors[1:]:
            out = out * _eval(t, pts)
        return out
    if isinstance(f, LineRestrict):
        return _eval(f.base, pts[:, :1] * np.asarray(f.direction)[None, :])
    if isinstance(f, GraphRestrict):
        return _eval(f.g, _graph_points(f, pts))
    if isinstance(f, Shift):
        return _eval(f.base, pts + np.asarray(f.offset)[None, :])
    if isinstance(f, Scale):
        return f.value_scale * _eval(f.base, pts * f.var_scale)
    raise TypeError(f"unknown expression node {type(f).__name__}")


def _graph_points(f: GraphRestrict, pts: np.ndarray) -> np.ndarray:
    cols = [pts] + [_eval(h, pts)[:, None] for h in f.fs]
    return np.hstack(cols)


def _clog(f: Expr, pts: np.ndarray) -> np.ndarray:
    if isinstance(f, Poly):
        return _poly_clog(f, pts)
    if isinstance(f, ExpPoly):
        if not f.parts:
            return np.full(pts.shape[0], -np.inf, dtype=complex)
        L = np.stack([_poly_clog(p, pts) + pts @ np.asarray(lin) for p, lin in f.parts])
        return _lse(L, axis=0)
    if isinstance(f, ExpOf):
        return _eval(f.inner, pts).astype(complex)
    if isinstance(f, Sum):
        return _lse(np.stack([_clog(t, pts) for t in f.terms]), axis=0)
    if isinstance(f, Product):
        return sum(_clog(t, pts) for t in f.factors)
    if isinstance(f, LineRestrict):
        return _clog(f.base, pts[:, :1] * np.asarray(f.direction)[None, :])
    if isinstance(f, GraphRestrict):
        return _clog(f.g, _graph_points(f, pts))
    if isinstance(f, Shift):
        return _clog(f.base, pts + np.asarray(f.offset)[None, :])
    if isinstance(f, Scale):
        if f.value_scale == 0:
            return np.full(pts.shape[0], -np.inf, dtype=complex)
        return np.log(f.value_scale) + _clog(f.base, pts * f.var_scale)
    raise TypeError(f"unknown expression node {type(f).__name__}")


def evaluate(f: Expr, z):
    """Evaluate ``f`` at one point or at an ``(N, n)`` array of points.

    For univariate expressions a 1-D array is read as N points.
    Raises :class:`EvaluationOverflow` if the result is not finite.
    """
    pts, single = _as_points(z, f.nvars)
    with np.errstate(over="ignore", invalid="ignore"):
        out = _eval(f, pts)
    if not np.all(np.isfinite(out)):
        raise EvaluationOverflow("non-finite value; use the log-evaluation path")
    return complex(out[0]) if single else out


def clog(f: Expr, z):
    """Complex logarithm of ``f(z)`` (real part is ``log|f(z)|``)."""
    pts, single = _as_points(z, f.nvars)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        out = _clog(f, pts)
    return complex(out[0]) if single else out


def log_abs(f: Expr, z):
    """``log|f(z)|`` without forming ``f(z)``; ``-inf`` at zeros."""
    out = clog(f, z)
    return out.real if isinstance(out, complex) else np.real(out)


# --------------------------------------------------------------- structure

def is_structurally_zero(f: Expr) -> bool:
    if isinstance(f, Poly):
        return f.is_zero
    if isinstance(f, ExpPoly):
        return not f.parts
    if isinstance(f, Product):
        return any(is_structurally_zero(t) for t in f.factors)
    if isinstance(f, Scale):
        return f.value_scale == 0 or is_structurally_zero(f.base)
    if isinstance(f, (Shift, LineRestrict)):
        return is_structurally_zero(f.base)
    if isinstance(f, GraphRestrict):
        return is_structurally_zero(f.g)
    return False


def is_structurally_constant(f: Expr) -> bool:
    if isinstance(f, Poly):
        return f.is_constant
    if isinstance(f, ExpPoly):
        return all(p.is_constant and not any(lin) for p, lin in f.parts)
    if isinstance(f, ExpOf):
        return is_structurally_constant(f.inner)
    if isinstance(f, Sum):
        return all(is_structurally_constant(t) for t in f.terms)
    if isinstance(f, Product):
        return (is_structurally_zero(f)
                or all(is_structurally_constant(t) for t in f.factors))
    if isinstance(f, (Shift, Scale, LineRestrict)):
        return is_structurally_constant(f.base)
    if isinstance(f, GraphRestrict):
        return is_structurally_constant(f.g)
    return False


# ------------------------------------------------------------ differentiation

def _poly_diff(p: Poly, i: int) -> Poly:
    terms = []
    for c, e in p.terms:
        if e[i]:
            ee = list(e)
            ee[i] -= 1
            terms.append((c * e[i], tuple(ee)))
    return Poly(p.nvars, tuple(terms))


def _is_zero_poly(f: Expr) -> bool:
    return isinstance(f, Poly) and f.is_zero


def _sum(items: list[Expr], nvars: int) -> Expr:
    items = [x for x in items if not _is_zero_poly(x)]
    if not items:
        return Poly(nvars)
    polys = [x for x in items if isinstance(x, Poly)]
    rest = [x for x in items if not isinstance(x, Poly)]
    if polys:
        acc = polys[0]
        for p in polys[1:]:
            acc = _poly_add(acc, p)
        if not acc.is_zero:
            rest = [acc] + rest
    if not rest:
        return Poly(nvars)
    return rest[0] if len(rest) == 1 else Sum(tuple(rest))


def _prod(items: list[Expr], nvars: int) -> Expr:
    if any(_is_zero_poly(x) for x in items):
        return Poly(nvars)
    items = [x for x in items if not (isinstance(x, Poly) and x.terms == ((1 + 0j, (0,) * nvars),))]
    if not items:
        return const(1.0, nvars)
    return items[0] if len(items) == 1 else Product(tuple(items))


def _scaled(f: Expr, s: complex) -> Expr:
    if s == 0:
        return Poly(f.nvars)
    if s == 1:
        return f
    if isinstance(f, Poly):
        return _poly_scale(f, s)
    return Scale(f, 1.0, s)


@lru_cache(maxsize=4096)
def diff(f: Expr, i: int = 0) -> Expr:
    """Symbolic partial derivative with respect to variable ``i``."""
    n = f.nvars
    if not 0 <= i < n:
        raise ArityError(f"variable index {i} out of range for arity {n}")
    if isinstance(f, Poly):
        return _poly_diff(f, i)
    if isinstance(f, ExpPoly):
        parts = []
        for p, lin in f.parts:
            dp = _poly_add(_poly_diff(p, i), _poly_scale(p, lin[i]))
            parts.append((dp, lin))
        return ExpPoly(n, tuple(parts))
    if isinstance(f, ExpOf):
        return _prod([f, diff(f.inner, i)], n)
    if isinstance(f, Sum):
        return _sum([diff(t, i) for t in f.terms], n)
    if isinstance(f, Product):
        items = []
        for j in range(len(f.factors)):
            dj = diff(f.factors[j], i)
            items.append(_prod([dj if k == j else t for k, t in enumerate(f.factors)], n))
        return _sum(items, n)
    if isinstance(f, LineRestrict):
        comps = [_scaled(diff(f.base, j), v) for j, v in enumerate(f.direction) if v != 0]
        inner = _sum(comps, f.base.nvars)
        if _is_zero_poly(inner):
            return Poly(1)
        return restrict_to_line(inner, Line(f.direction))
    if isinstance(f, GraphRestrict):
        items = [GraphRestrict(diff(f.g, i), f.fs)]
        for k, h in enumerate(f.fs):
            dh = diff(h, i)
            if _is_zero_poly(dh):
                continue
            items.append(_prod([GraphRestrict(diff(f.g, n + k), f.fs), dh], n))
        return _sum(items, n)
    if isinstance(f, Shift):
        d = diff(f.base, i)
        return d if _is_zero_poly(d) else Shift(d, f.offset)
    if isinstance(f, Scale):
        d = diff(f.base, i)
        if _is_zero_poly(d):
            return Poly(n)
        return Scale(d, f.var_scale, f.value_scale * f.var_scale)
    raise TypeError(f"unknown expression node {type(f).__name__}")


def _quadrature_derivative(f: Expr, pts: np.ndarray, v: np.ndarray,
                           tol: float = 1e-10, max_nodes: int = 4096) -> np.ndarray:
    radius = np.minimum(0.1, 0.01 * (1.0 + np.linalg.norm(pts, axis=1)))

    def estimate(m):
        w = np.exp(2j * np.pi * np.arange(m) / m)
        zeta = radius[:, None] * w[None, :]
        grid = pts[:, None, :] + zeta[..., None] * v[None, None, :]
        vals = _eval(f, grid.reshape(-1, f.nvars)).reshape(len(pts), m)
        return (vals / w[None, :]).mean(axis=1) / radius

    m = 64
    prev = estimate(m)
    while m < max_nodes:
        m *= 2
        cur = estimate(m)
        if np.all(np.abs(cur - prev) <= tol * np.maximum(1.0, np.abs(cur))):
            return cur
        prev = cur
    return prev


def directional_derivative(f: Expr, z, v, method: str = "auto"):
    """``D_v f(z) = sum_i v_i * df/dz_i``.

    Polynomials and exponential polynomials are differentiated
    symbolically; other nodes use a Cauchy integral on a small circle
    unless ``method="symbolic"`` is requested.
    """
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if v.shape[0] != f.nvars:
        raise ArityError("direction has the wrong dimension")
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValueError("direction must have unit norm")
    pts, single = _as_points(z, f.nvars)
    if method == "auto":
        method = "symbolic" if isinstance(f, (Poly, ExpPoly)) else "quadrature"
    if method == "symbolic":
        out = sum(vi * _eval(diff(f, i), pts) for i, vi in enumerate(v) if vi != 0)
        if np.isscalar(out):
            out = np.zeros(pts.shape[0], dtype=complex)
    elif method == "quadrature":
        out = _quadrature_derivative(f, pts, v)
    else:
        raise ValueError(f"unknown method {method!r}")
    return complex(out[0]) if single else out


# ---------------------------------------------------------------- restrictions

def restrict_to_line(f: Expr, line: Line | Sequence[complex]) -> Expr:
    """Univariate ``h(zeta) = f(zeta * v)``."""
    if not isinstance(line, Line):
        line = Line(tuple(np.atleast_1d(np.asarray(line, dtype=complex))))
    if line.dim != f.nvars:
        raise ArityError("line dimension does not match the expression")
    v = np.asarray(line.direction)
    if isinstance(f, Poly):
        terms = [(c * complex(np.prod(v ** np.asarray(e))), (sum(e),)) for c, e in f.terms]
        return Poly(1, tuple(terms))
    if isinstance(f, ExpPoly):
        parts = [(restrict_to_line(p, line), (complex(np.dot(lin, v)),)) for p, lin in f.parts]
        return ExpPoly(1, tuple(parts))
    if f.nvars == 1 and line.direction == (1 + 0j,):
        return f
    return LineRestrict(f, line.direction)


def shift(f: Expr, offset: Sequence[complex]) -> Expr:
    """``z -> f(z + offset)``; expanded exactly for polynomials."""
    off = np.atleast_1d(np.asarray(offset, dtype=complex))
    if not np.any(off):
        return f
    if isinstance(f, Poly):
        n = f.nvars
        linear = [var(i, n) + const(off[i], n) for i in range(n)]
        acc = Poly(n)
        cache: dict[tuple, Poly] = {}
        for c, e in f.terms:
            term = const(c, n)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = _poly_pow(linear[i], k)
                    term = _poly_mul(term, cache[key])
            acc = _poly_add(acc, term)
        return acc
    return Shift(f, tuple(off))


def _compose_poly(g: Poly, fs: Sequence[Poly]) -> Poly:
    n = fs[0].nvars
    acc = Poly(n)
    powers: dict[tuple, Poly] = {}
    for c, e in g.terms:
        a, b = e[:n], e[n:]
        term = Poly(n, ((c, a),))
        for j, bj in enumerate(b):
            if bj:
                if (j, bj) not in powers:
                    powers[(j, bj)] = _poly_pow(fs[j], bj)
                term = _poly_mul(term, powers[(j, bj)])
        acc = _poly_add(acc, term)
    return acc


def graph_restriction(g: Expr, f: Expr | Sequence[Expr]) -> Expr:
    """``z -> g(z, f(z))``; ``f`` may be a sequence for several graphs."""
    fs = tuple(f) if isinstance(f, (list, tuple)) else (f,)
    n = fs[0].nvars
    if any(h.nvars != n for h in fs) or g.nvars != n + len(fs):
        raise ArityError(
            f"graph restriction arity mismatch: g has {g.nvars} variables, "
            f"expected {n + len(fs)}")
    if isinstance(g, Poly) and all(isinstance(h, Poly) for h in fs):
        return _compose_poly(g, fs)
    return GraphRestrict(g, fs)


# ---------------------------------------------------------------- JSON I/O

def _cnum(c: complex) -> dict:
    c = complex(c)
    return {"re": c.real, "im": c.imag}


def _uncnum(d) -> complex:
    if isinstance(d, (int, float)):
        return complex(d)
    return complex(float(d["re"]), float(d.get("im", 0.0)))


def to_dict(f: Expr) -> dict:
    if isinstance(f, Poly):
        return {"type": "poly", "nvars": f.nvars,
                "terms": [{**_cnum(c), "exps": list(e)} for c, e in f.terms]}
    if isinstance(f, ExpPoly):
        return {"type": "exppoly", "nvars": f.nvars,
                "parts": [{"poly": to_dict(p), "lin": [_cnum(x) for x in lin]}
                          for p, lin in f.parts]}
    if isinstance(f, ExpOf):
        return {"type": "expof", "inner": to_dict(f.inner)}
    if isinstance(f, Sum):
        return {"type": "sum", "terms": [to_dict(t) for t in f.terms]}
    if isinstance(f, Product):
        return {"type": "product", "factors": [to_dict(t) for t in f.factors]}
    if isinstance(f, LineRestrict):
        return {"type": "line", "base": to_dict(f.base),
                "direction": [_cnum(x) for x in f.direction]}
    if isinstance(f, GraphRestrict):
        fs = [to_dict(h) for h in f.fs]
        return {"type": "graph", "g": to_dict(f.g), "f": fs[0] if len(fs) == 1 else fs}
    if isinstance(f, Shift):
        return {"type": "shift", "base": to_dict(f.base),
                "offset": [_cnum(x) for x in f.offset]}
    if isinstance(f, Scale):
        return {"type": "scale", "base": to_dict(f.base),
                "var_scale": _cnum(f.var_scale), "value_scale": _cnum(f.value_scale)}
    raise TypeError(f"unknown expression node {type(f).__name__}")


def from_dict(d: dict) -> Expr:
    kind = d.get("type")
    if kind == "poly":
        n = int(d["nvars"])
        return Poly(n, tuple((_uncnum(t), tuple(t["exps"])) for t in d.get("terms", [])))
    if kind == "exppoly":
        n = int(d["nvars"])
        return ExpPoly(n, tuple((from_dict(p["poly"]), tuple(_uncnum(x) for x in p["lin"]))
                                for p in d.get("parts", [])))
    if kind == "expof":
        return ExpOf(from_dict(d["inner"]))
    if kind == "sum":
        return Sum(tuple(from_dict(t) for t in d["terms"]))
    if kind == "product":
        return Product(tuple(from_dict(t) for t in d["factors"]))
    if kind == "line":
        return LineRestrict(from_dict(d["base"]), tuple(_uncnum(x) for x in d["direction"]))
    if kind == "graph":
        fs = d["f"]
        fs = [from_dict(x) for x in fs] if isinstance(fs, list) else [from_dict(fs)]
        return GraphRestrict(from_dict(d["g"]), tuple(fs))
    if kind == "shift":
        return Shift(from_dict(d["base"]), tuple(_uncnum(x) for x in d["offset"]))
    if kind == "scale":
        return Scale(from_dict(d["base"]), _uncnum(d["var_scale"]), _uncnum(d["value_scale"]))
    raise ValueError(f"unknown function type {kind!r}")


def dumps(f: Expr) -> str:
    return json.dumps(to_dict(f), sort_keys=True)


def loads(s: str) -> Expr:
    return from_dict(json.loads(s))


def save(f: Expr, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(f) + "\n")


def load(path) -> Expr:
    with open(path) as fh:
        return loads(fh.read())
