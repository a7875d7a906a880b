import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from holgraph import constants as K
from holgraph import funcmodel as fm
from holgraph.modulus import disk, growth_ratio, log_max
from holgraph.quantities import (check_admissibility, class_params, class_params_exp_poly,
                                 n_f_quantity)
from holgraph.zeros import valency


@pytest.mark.parametrize("d", [1, 2, 5])
@pytest.mark.parametrize("t", [2.0, 9.0])
def test_monomials_admissible(d, t):
    ok, gd = check_admissibility(fm.monomial([d]), 1.0, t)
    assert ok
    assert abs(gd.R_t2_log - d * math.log(t)) < 1e-9


def test_one_plus_z_shift():
    ok, gd = check_admissibility(fm.poly1d([1, 1]), 1.0, 2.0)
    assert not ok
    assert abs(gd.R_t2_log - math.log(1.5 / 1.25)) < 1e-12
    assert gd.shifted is not None and gd.shifted.admissible
    assert abs(gd.shift_value - 1) < 1e-15


def test_vanishing_at_origin_always_admissible(rng):
    for _ in range(20):
        deg = int(rng.integers(1, 6))
        c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
        c[0] = 0
        t = float(rng.uniform(1.1, 9.0))
        ok, _ = check_admissibility(fm.poly1d(c), float(rng.uniform(0.2, 3)), t)
        assert ok


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_homogeneous_nf_equals_degree(d):
    for f in (fm.monomial([d]), fm.poly({(d, 0): 1.0, (0, d): 1.0}),
              fm.poly({(d, 0): 1.0, (d - 1, 1): 0.5, (0, d): -0.3})):
        assert n_f_quantity(f, 1.0, 9.0).N_f == d


def test_two_variable_sandwich_and_budget_stability():
    f = fm.poly({(2, 0): 1.0, (0, 3): 1.0})
    a = n_f_quantity(f, 1.0, 4.0, line_budget=8)
    b = n_f_quantity(f, 1.0, 4.0, line_budget=16)
    assert a.N_f >= a.V_f >= 2
    assert min(a.line_valencies) <= a.N_f <= max(a.line_valencies)
    assert a.N_f == b.N_f


@pytest.mark.parametrize("coeffs", [[0, 1, 0.3], [0.2, -1, 0, 0.5], [1, 0.5, 0.25, 0.125, 1]])
def test_n1_bridge_and_le41(coeffs):
    f = fm.poly1d(coeffs)
    r, t = 1.5, 4.0
    ok, _ = check_admissibility(f, r, t)
    if not ok:
        f = f - coeffs[0]
    gd = n_f_quantity(f, r, t)
    v = valency(f, disk(r / math.sqrt(t))).valency
    assert gd.N_f == v
    for s in np.geomspace(t, 1e4, 12):
        assert growth_ratio(f, r, t, s) / K.k_ts(t, s) <= v + 1e-9


def test_class_params_g_equals_w():
    cp = class_params(fm.monomial([0, 1]), 1.0, 9.0, math.log(81))
    assert cp.p < 1e-12
    assert cp.q <= 1 + 1e-9


@pytest.mark.parametrize("k, l", [(0, 2), (1, 1), (2, 3)])
def test_class_params_bidegree_caps(k, l):
    g = fm.poly({(0, l): 1.0, (k, l): 0.3})
    cp = class_params(g, 1.0, 9.0, math.log(81))
    assert cp.p <= k * math.log(9) + 1e-9
    assert cp.q <= l + 1e-9


def test_class_params_scaling_and_monotone():
    g = fm.poly({(1, 1): 1.0, (0, 2): 0.5, (2, 0): -0.2})
    a = class_params(g, 1.0, 4.0, math.log(16), max_rounds=1)
    b = class_params(3.5j * g, 1.0, 4.0, math.log(16), max_rounds=1)
    assert abs(a.p - b.p) < 1e-9 and abs(a.q - b.q) < 1e-9
    bigger = class_params(g, 1.0, 4.0, math.log(16), line_budget=4, w_budget=16, z_budget=12,
                          max_rounds=1)
    assert bigger.p >= a.p - 1e-12 and bigger.q >= a.q - 1e-12


def test_exp_poly_caps():
    poly = fm.ExpPoly(2, ((fm.poly({(1, 1): 1.0, (0, 0): 2.0}), (0.0, 0.0)),))
    cp = class_params_exp_poly(poly, 1.0, fm.monomial([1]))
    assert cp.p == 3 and cp.q_witness["q_general"] == 3
    e = fm.ExpPoly(2, ((fm.const(1.0, 2), (1.0, 1.0)),))
    r = 0.7
    cp = class_params_exp_poly(e, r, fm.monomial([1]))
    assert abs(cp.p - (1 + 2 * math.e ** 2 * math.sqrt(2) * r)) < 1e-12
    d = 3
    wfree = fm.ExpPoly(2, ((fm.monomial([0, d]), (0.5, 0.0)),))
    cp = class_params_exp_poly(wfree, 1.0, fm.monomial([1]))
    assert cp.q == d


@settings(max_examples=20, deadline=None)
@given(d=st.integers(1, 4), r=st.floats(0.2, 3.0), t=st.floats(1.2, 9.0))
def test_monomial_nf_property(d, r, t):
    assert n_f_quantity(fm.monomial([d]), r, t).N_f == d
