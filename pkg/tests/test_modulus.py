import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from holgraph import funcmodel as fm
from holgraph import oracle as O
from holgraph.modulus import ball, disk, growth_ratio, log_max, max_modulus, three_circle_check

from conftest import CORPUS, CORPUS_1D

EXP = fm.ExpOf(fm.var(0, 1))


@pytest.mark.parametrize("d", [1, 2, 5])
@pytest.mark.parametrize("r", [0.3, 1.0, 4.0])
def test_monomial_max_is_exact(d, r):
    assert abs(max_modulus(fm.monomial([d]), disk(r)).log_value - d * math.log(r)) < 1e-12


@pytest.mark.parametrize("r", [0.5, 1.0, 3.0])
def test_exp_max_and_witness(r):
    res = max_modulus(EXP, disk(r))
    assert abs(res.log_value - r) < 1e-12
    assert abs(complex(res.witness[0]) - r) < 1e-5


def test_quadratic_max_matches_grid_oracle():
    f = fm.poly1d([1, 1, 1])
    res = max_modulus(f, disk(1.0))
    assert abs(res.log_value - math.log(3)) < 1e-12
    assert abs(res.log_value - O.grid_max(f, 0j, 1.0)) < 1e-9
    assert abs(complex(res.witness[0]) - 1) < 1e-5


def test_ball_max_multivariate():
    f = fm.monomial([1, 1])
    # max |z1 z2| on the unit ball is 1/2
    assert abs(log_max(f, 1.0) - math.log(0.5)) < 1e-9


def test_three_circle_examples():
    rep = three_circle_check(fm.monomial([3]), None, 0.5, 1.0, 2.0)
    assert rep.passed and abs(rep.margin_log) < 1e-9
    rep = three_circle_check(EXP, None, 1.0, 2.0, 4.0)
    assert rep.passed and abs(rep.margin_log - 0.5) < 1e-9
    rep = three_circle_check(fm.const(1.0, 1), None, 1.0, 2.0, 4.0)
    assert rep.passed and abs(rep.margin_log) < 1e-12


@pytest.mark.parametrize("d", [1, 4])
@pytest.mark.parametrize("t, s", [(2.0, 4.0), (9.0, 81.0)])
def test_growth_ratio_closed_forms(d, t, s):
    assert abs(growth_ratio(fm.monomial([d]), 1.0, t, s) - d * math.log(s / t)) < 1e-12
    assert abs(growth_ratio(EXP, 1.0, t, s) - (1 / t - 1 / s)) < 1e-12


def test_growth_ratio_matches_grid():
    f = fm.poly1d([0, 1e-3, 1])
    want = O.grid_max(f, 0j, 0.5) - O.grid_max(f, 0j, 0.25)
    assert abs(growth_ratio(f, 1.0, 2.0, 4.0) - want) < 1e-8


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_max_modulus_monotone_and_witness(name):
    f = CORPUS[name]
    radii = np.geomspace(0.2, 3.0, 7)
    vals = [log_max(f, r) for r in radii]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    res = max_modulus(f, disk(1.0) if f.nvars == 1 else ball(1.0, n=f.nvars))
    w = np.asarray(res.witness, dtype=complex).reshape(1, -1)
    at = float(fm.log_abs(f, w)[0])
    width = max(res.upper_bracket - res.lower_bracket, 1e-9)
    assert abs(at - res.log_value) <= width + 1e-12


@pytest.mark.parametrize("name", sorted(CORPUS_1D))
def test_hadamard_consequences_on_corpus(name):
    f = CORPUS_1D[name]
    for r0, r1, r2 in [(0.5, 1.0, 2.0), (1.0, 2.0, 6.0), (0.1, 0.7, 3.5)]:
        rep = three_circle_check(f, None, r0, r1, r2)
        assert rep.status in ("pass", "vacuous")
        for sub in rep.sub_reports:
            assert sub.margin_log >= -1e-9, (name, sub.name)


@settings(max_examples=25, deadline=None)
@given(a=st.floats(-2, 2), b=st.floats(-2, 2), r=st.floats(0.1, 3), k=st.floats(1.01, 3))
def test_log_convexity_property(a, b, r, k):
    f = fm.poly1d([1.0, a, b, 0.5j])
    m0, m1, m2 = (log_max(f, x) for x in (r, r * k, r * k * k))
    assert m1 <= 0.5 * (m0 + m2) + 1e-9
