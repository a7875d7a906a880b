"""Brute-force reference computations used to validate the main modules.

Nothing here is tuned or clever: dense grids, companion matrices and
explicit phase tracking.  This module depends only on :mod:`funcmodel`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import funcmodel as fm

__all__ = ["OracleConfig", "grid_max", "circle_grid_min", "poly_roots", "roots_in_disk",
           "winding_count"]


@dataclass(frozen=True)
class OracleConfig:
    grid_density: int = 100_000
    seed: int = 0
    max_degree: int = 12


def _logabs(f, pts):
    if isinstance(f, fm.Expr):
        return np.asarray(fm.log_abs(f, pts), dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(np.asarray(f(pts))))


def grid_max(f, center, radius: float, density: int = 100_000, seed: int = 0) -> float:
    """Max of ``log|f|`` over a uniform boundary grid (random for spheres)."""
    c = np.atleast_1d(np.asarray(center, dtype=complex))
    n = c.shape[0]
    if n == 1:
        th = 2 * np.pi * np.arange(density) / density
        pts = (c[0] + radius * np.exp(1j * th)).reshape(-1, 1)
    else:
        g = np.random.default_rng(seed).standard_normal((density, 2 * n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        pts = c[None, :] + radius * (g[:, :n] + 1j * g[:, n:])
    return float(np.max(_logabs(f, pts)))


def circle_grid_min(f, center: complex, radius: float, density: int = 10_000) -> float:
    th = 2 * np.pi * np.arange(density) / density
    pts = (complex(center) + radius * np.exp(1j * th)).reshape(-1, 1)
    return float(np.min(_logabs(f, pts)))


def _horner(coeffs_asc: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z, dtype=complex)
    for c in coeffs_asc[::-1]:
        out = out * z + c
    return out


def poly_roots(coeffs) -> np.ndarray:
    """All roots of ``sum coeffs[k] z**k`` from companion-matrix eigenvalues."""
    a = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    deg = a.shape[0] - 1
    if deg < 1:
        raise ValueError("degree must be at least 1")
    monic = a[:-1] / a[-1]
    C = np.zeros((deg, deg), dtype=complex)
    C[1:, :-1] = np.eye(deg - 1)
    C[:, -1] = -monic
    roots = np.linalg.eigvals(C)
    scale = np.abs(a).sum() * np.maximum(1.0, np.abs(roots)) ** deg
    res = np.abs(_horner(a, roots)) / scale
    if np.any(res > 1e-8):
        raise ArithmeticError(f"companion roots did not converge (residual {res.max():.2e})")
    return roots


def roots_in_disk(coeffs, center: complex = 0j, radius: float = 1.0) -> int:
    r = poly_roots(coeffs)
    return int(np.sum(np.abs(r - center) < radius))


def winding_count(h, center: complex = 0j, radius: float = 1.0, segments: int = 1024,
                  max_points: int = 1 << 22) -> int:
    """Winding number of ``h`` along the circle by phase tracking."""
    th = np.linspace(0.0, 2 * np.pi, segments + 1)
    while True:
        z = complex(center) + radius * np.exp(1j * th)
        vals = np.asarray(fm.evaluate(h, z)) if isinstance(h, fm.Expr) else np.asarray(h(z))
        if np.any(vals == 0):
            raise ArithmeticError("zero on the contour")
        d = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(d) >= np.pi / 2
        if not bad.any():
            return int(round(d.sum() / (2 * np.pi)))
        if th.size > max_points:
            raise ArithmeticError("phase step never fell below pi/2")
        mids = 0.5 * (th[:-1][bad] + th[1:][bad])
        th = np.sort(np.concatenate([th, mids]))

