"""Shared corpus, random generators and the acceptance summary printer."""

from __future__ import annotations

import numpy as np
import pytest

from holgraph import funcmodel as fm

ACCEPTANCE_LINES: dict[int, str] = {}


def exp_lin(coef: complex, lam: complex, deg: int = 0) -> fm.ExpPoly:
    """``coef * z**deg * exp(lam z)``."""
    return fm.ExpPoly(1, ((fm.monomial([deg], coef), (lam,)),))


def _corpus_1d() -> dict[str, fm.Expr]:
    rng = np.random.default_rng(20240601)
    out = {
        "z^3": fm.monomial([3]),
        "z^2+z+1": fm.poly1d([1, 1, 1]),
        "1+z": fm.poly1d([1, 1]),
        "const": fm.const(2.0, 1),
        "three_roots": fm.poly1d(np.poly([0.9, -0.5j, 0.3])[::-1]),
        "exp": fm.ExpOf(fm.var(0, 1)),
        "cos": exp_lin(0.5, 1j) + exp_lin(0.5, -1j),
        "z_exp_z+1": exp_lin(1.0, 1.0, 1) + fm.const(1.0, 1),
        "exp_exp": fm.ExpOf(fm.ExpOf(fm.var(0, 1)) - 1.0),
    }
    for i in range(6):
        deg = int(rng.integers(1, 7))
        c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
        out[f"rand{i}_deg{deg}"] = fm.poly1d(c)
    return out


def _corpus_nd() -> dict[str, fm.Expr]:
    return {
        "z1^2+z2^3": fm.poly({(2, 0): 1.0, (0, 3): 1.0}),
        "z1z2+1": fm.poly({(1, 1): 1.0, (0, 0): 1.0}),
        "exp(z1+z2)": fm.ExpPoly(2, ((fm.const(1.0, 2), (1.0, 1.0)),)),
    }


CORPUS_1D = _corpus_1d()
CORPUS_ND = _corpus_nd()
CORPUS = {**CORPUS_1D, **CORPUS_ND}


def random_poly(rng: np.random.Generator, max_deg: int = 8, min_deg: int = 1) -> fm.Poly:
    deg = int(rng.integers(min_deg, max_deg + 1))
    c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
    return fm.poly1d(c)


def coeffs_of(p: fm.Poly) -> np.ndarray:
    out = np.zeros(p.degree + 1, dtype=complex)
    for c, (e,) in p.terms:
        out[e] += c
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
