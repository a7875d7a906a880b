import itertools
import math

import mpmath as mp
import numpy as np
import pytest

from holgraph import funcmodel as fm
from holgraph import transcendence as T

EXP = fm.ExpOf(fm.var(0, 1))


def _monomials(n: int, k: int) -> int:
    return sum(1 for e in itertools.product(range(k + 1), repeat=n) if sum(e) <= k)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dimension_identity(n):
    for k in range(0, 21 if n < 3 else 13):
        want = math.factorial(n + k + 1) // (math.factorial(n + 1) * math.factorial(k))
        assert T.d_kn(k, n + 1) == want == _monomials(n + 1, k)


@pytest.mark.parametrize("k", range(1, 17))
def test_pk_formula_n1(k):
    assert T.p_k(k, 1) == k * k // 3


def test_pk_general_n():
    for n in (2, 3):
        for k in range(1, 15):
            p = T.p_k(k, n)
            x = k ** (1 + 1 / n) / (n + 2) ** (1 / n)
            assert p <= x + 1e-9 < p + 1


def test_dimension_limits_at_16():
    k, n = 16, 1
    assert abs(T.d_kn(k, n + 1) / k ** (n + 1) / (1 / math.factorial(n + 1)) - 1) < 0.2
    lim = 1 / ((n + 2) * math.factorial(n))
    assert abs(T.d_kn(T.p_k(k, n), n) / k ** (n + 1) / lim - 1) < 0.2


def test_flat_polynomial_k10():
    fp = T.flat_polynomial(EXP, 10)
    assert fp.p_k == 33 and T.d_kn(33, 1) == 34 and T.d_kn(10, 2) == 66
    assert fp.residual < 1e-10
    norm = math.sqrt(sum(abs(c) ** 2 for c, _ in fp.g.terms))
    assert abs(norm - 1) < 1e-12
    # independent 2^8-node quadrature in extended precision
    with mp.workdps(60):
        nodes, rad = 256, mp.mpf("0.5")
        terms = [(mp.mpc(c), e) for c, e in fp.g.terms]
        vals = []
        for j in range(nodes):
            z = rad * mp.expjpi(mp.mpf(2 * j) / nodes)
            ez = mp.exp(z)
            vals.append(mp.fsum(c * z ** e[0] * ez ** e[1] for c, e in terms))
        for m in range(34):
            coef = mp.fsum(v * mp.expjpi(-mp.mpf(2 * j * m) / nodes)
                           for j, v in enumerate(vals)) / nodes
            assert abs(coef) < 1e-10
    # g_f is not identically zero away from the origin
    gf = fm.graph_restriction(fp.g, EXP)
    rng = np.random.default_rng(0)
    z = 2 + rng.uniform(0, 1, 16) * np.exp(2j * np.pi * rng.uniform(size=16))
    assert np.all(np.abs(fm.evaluate(gf, z.reshape(-1, 1))) > 0)


def test_polynomial_guard():
    with pytest.raises(T.PolynomialInputError):
        T.flat_polynomial(fm.poly1d([1, 2, 3]), 6)
    lo, sampled, det = T.mk_estimate(fm.poly1d([1, 2, 3]), 6)
    assert math.isnan(lo) and "diagnostic" in det


def test_mk_estimate_k10():
    lo, sampled, det = T.mk_estimate(EXP, 10)
    assert lo == pytest.approx(34.0, abs=1e-12)
    assert det["mk_flat"] >= lo


def test_mk_lower_monotone():
    vals = [(T.p_k(k, 1) + 1) for k in range(1, 30)]
    assert vals == sorted(vals)


def test_two_variables():
    f = fm.ExpPoly(2, ((fm.const(1.0, 2), (1.0, 0.5)),))
    fp = T.flat_polynomial(f, 4)
    assert fp.residual < 1e-10
    assert T.d_kn(fp.p_k, 2) < T.d_kn(4, 3)


def test_trend_points():
    data = T.tau_bounds(EXP, [6, 7], budget=2)
    assert data.trend_target == pytest.approx(1 / 3)
    for row in data.per_k:
        k = row["k"]
        assert row["mk"] / k ** 2 >= (k * k // 3 + 1) / k ** 2 - 1e-12
    assert data.trend_ok
