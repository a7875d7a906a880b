import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from holgraph import constants as K
from holgraph import funcmodel as fm
from holgraph import oracle as O
from holgraph.modulus import disk, min_modulus_circle
from holgraph.zeros import (bernstein_index, count_zeros, locate_zeros, valency,
                            valency_lower_bound, vp_zero_bound)

from conftest import CORPUS_1D, coeffs_of, random_poly

EXP = fm.ExpOf(fm.var(0, 1))


def test_count_examples():
    assert count_zeros(fm.poly1d([-0.25, 0, 1]), disk(1.0)).count == 2
    for d in (1, 3, 7):
        for r in (0.01, 1.0, 5.0):
            assert count_zeros(fm.monomial([d]), disk(r)).count == d


def test_identically_zero_flagged():
    g = fm.poly({(0, 1): 1.0, (2, 0): -1.0})
    gf = fm.graph_restriction(g, fm.monomial([2]))
    assert count_zeros(gf, disk(1.0)).identically_zero


def test_count_against_companion_up_to_degree_12(rng):
    done = 0
    while done < 100:
        p = random_poly(rng, 12)
        roots = O.poly_roots(coeffs_of(p))
        if np.min(np.abs(np.abs(roots) - 1.5)) < 1e-6:
            continue
        assert count_zeros(p, disk(1.5)).count == int(np.sum(np.abs(roots) < 1.5))
        done += 1


def test_locate_zeros_multiplicity():
    p = fm.poly1d(np.poly([0.2, 0.2, 0.2, -0.5j])[::-1])
    zs = locate_zeros(p, disk(1.0))
    mults = sorted(m for _, m in zs)
    assert mults == [1, 3]


@pytest.mark.parametrize("h, region, want", [
    (fm.monomial([4]), disk(1.0), 4),
    (fm.monomial([2]), disk(3.0), 2),
    (fm.poly1d([0, 1, 1]), disk(1.0), 2),
    (EXP, disk(1.0), 1),
])
def test_valency_examples(h, region, want):
    assert valency(h, region).valency == want


def test_valency_quadratic_grid_oracle():
    # z^2 + z = u has two roots in D for u near the critical value -1/4
    h = fm.poly1d([0, 1, 1])
    best = 0
    for u in np.linspace(-1, 1, 21)[:, None] + 1j * np.linspace(-1, 1, 21)[None, :]:
        for c in u:
            best = max(best, O.roots_in_disk([-c, 1, 1]))
    assert valency(h, disk(1.0)).valency == best == 2


@pytest.mark.parametrize("d", [1, 3])
def test_bernstein_index_monomial(d):
    assert abs(bernstein_index(fm.monomial([d]), disk(1.0)).value - d) < 1e-6


def test_bernstein_index_degenerate():
    assert bernstein_index(fm.const(0.0, 1), disk(1.0)).value == 0
    assert bernstein_index(fm.const(3.0, 1), disk(1.0)).value == 0


@pytest.mark.parametrize("lam", [2.0, 1e-3j, -7 + 1j])
def test_bernstein_index_scale_invariant(lam):
    h = fm.poly1d([0.3, -1, 0.2, 1])
    a = bernstein_index(h, disk(1.0)).value
    b = bernstein_index(lam * h, disk(1.0)).value
    assert abs(a - b) < 1e-9


def test_vp_examples():
    for d in (1, 2, 5):
        b = vp_zero_bound(fm.monomial([d]), 1.0, 0.5)
        assert abs(b - d * math.log(2) / math.log(1.25)) < 1e-9
    assert vp_zero_bound(fm.const(2.0, 1), 1.0, 0.5) == 0


def test_vp_random_deg5(rng):
    for _ in range(100):
        c = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        p = fm.poly1d(c)
        assert vp_zero_bound(p, 2.0, 0.5) >= O.roots_in_disk(c, 0j, 1.0) - 1e-9


def test_valency_lower_bound_examples():
    for d in (1, 4, 9):
        assert valency_lower_bound(fm.monomial([d]), 1.0, 9.0, 9.0) == 1.0
        b = valency_lower_bound(fm.monomial([d]), 1.0, 9.0, 81.0)
        assert abs(b - max(d * math.log(9) / K.k_ts(9.0, 81.0), 1.0)) < 1e-9
        assert b <= d


@pytest.mark.parametrize("name", sorted(k for k in CORPUS_1D if k != "const"))
def test_bounds_on_corpus(name):
    h = CORPUS_1D[name]
    R, beta = 2.5, 0.5
    assert min_modulus_circle(h, beta * R).log_value > -20
    assert vp_zero_bound(h, R, beta) >= count_zeros(h, disk(beta * R)).count - 1e-9
    for t, s in ((4.0, 4.0), (4.0, 16.0), (9.0, 81.0)):
        assert valency_lower_bound(h, R, t, s) <= valency(h, disk(R / math.sqrt(t))).valency + 1e-9


def test_count_of_shift_below_valency(rng):
    h = fm.poly1d([0.1, 1.0, -0.5, 0.8])
    v = valency(h, disk(1.0)).valency
    for _ in range(50):
        c = 0.8 * (rng.standard_normal() + 1j * rng.standard_normal())
        try:
            n = count_zeros(h + c, disk(1.0)).count
        except ArithmeticError:
            continue
        assert n <= v


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_rouche_stability(seed):
    rng = np.random.default_rng(seed)
    h = random_poly(rng, 8)
    mm = min_modulus_circle(h, 1.0, samples=4096).log_value
    if not math.isfinite(mm) or mm < -20:
        return
    eps = 0.5 * math.exp(mm)
    assert count_zeros(h + eps, disk(1.0)).count == count_zeros(h, disk(1.0)).count


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_count_matches_companion_property(seed):
    rng = np.random.default_rng(seed)
    p = random_poly(rng, 10)
    roots = O.poly_roots(coeffs_of(p))
    if np.min(np.abs(np.abs(roots) - 1.0)) < 1e-6:
        return
    assert count_zeros(p, disk(1.0)).count == int(np.sum(np.abs(roots) < 1.0))


@pytest.mark.parametrize("gap", [1.1e-6, -1.1e-6, 3e-8])
def test_count_with_root_near_contour(gap):
    roots = [1.0 - gap, 0.3j, -0.5]
    p = fm.poly1d(np.poly(roots)[::-1])
    assert count_zeros(p, disk(1.0)).count == sum(abs(z) < 1 for z in roots)
