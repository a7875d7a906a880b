import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from holgraph import certifier as C
from holgraph import constants as K
from holgraph import funcmodel as fm
from holgraph.modulus import log_max

Z2 = fm.monomial([2])
W = fm.monomial([0, 1])
EXP = fm.ExpOf(fm.var(0, 1))


@pytest.fixture(scope="module")
def te1_z2_w():
    su = C.te1_setup(Z2, W, 1.0, 9.0)
    return su, C.certify_te1(Z2, W, 1.0, 9.0, setup=su)


def test_te1_quadratic_graph(te1_z2_w):
    su, (sup, growth) = te1_z2_w
    assert sup.paper_tag == "e15" and growth.paper_tag == "e18"
    assert sup.status == growth.status == "pass"
    assert abs(sup.lhs_log - math.log(81)) < 1e-9
    assert su.p < 1e-12 and su.q <= 1 + 1e-9
    assert abs(su.params["M1_log"] + math.log(81)) < 1e-9
    assert abs(su.params["M2_log"] - math.log(81)) < 1e-9
    assert sup.rhs_log > 1e3


def test_te1_degenerate_counterexample():
    g = (W - fm.monomial([3, 0])) * (fm.const(1.0, 2) + 0.5 * W)
    sup, growth = C.certify_te1(fm.monomial([3]), g, 1.0, 9.0)
    assert sup.status == "degenerate"
    assert any("degenerate" in n for n in sup.notes)


def test_te1_shift_tags():
    f = fm.poly1d([1, 1])
    sup, growth = C.certify_te1(f, W, 1.0, 2.0)
    assert (sup.paper_tag, growth.paper_tag) == ("e15'", "e18'")


def test_te1_is_deterministic():
    a = [r.to_dict() for r in C.certify_te1(Z2, W, 1.0, 9.0)]
    b = [r.to_dict() for r in C.certify_te1(Z2, W, 1.0, 9.0)]
    assert a == b


def test_corollaries_consistency(te1_z2_w):
    su, (_, growth) = te1_z2_w
    g = fm.monomial([0, 2])
    su2 = C.te1_setup(Z2, g, 1.0, 9.0)
    _, gr2 = C.certify_te1(Z2, g, 1.0, 9.0, setup=su2)
    full = C.CellSet(1, (0j,), 1.0, full_ball=True)
    reps = C.certify_corollaries(Z2, g, 1.0, 9.0, {"omega": full, "remez_s": 1.0},
                                 setup=su2)
    by = {r.name: r for r in reps}
    assert [r.paper_tag for r in reps] == ["e110", "e111", "e112", "e112", "e113"]
    assert all(r.status == "pass" for r in reps)
    at_r = [s for s in by["bernstein"].sub_reports if abs(s.params["s"] - 1.0) < 1e-15]
    assert at_r and abs(at_r[0].margin_log - gr2.margin_log) <= 1e-12
    # full ball: the Phi term vanishes, so the sides differ by the scaled c-term only
    phi = by["remez_phi"]
    assert abs(phi.params["log_phi"]) < 1e-15
    assert abs(phi.lhs_log - log_max(fm.graph_restriction(g, Z2), 1.0)) < 1e-9


@pytest.mark.parametrize("d", [1, 2, 3])
def test_jensen_on_sharpness_family(d):
    f, g = fm.monomial([d]), fm.monomial([0, d])
    reps = C.certify_corollaries(f, g, 1.0, 9.0)
    jensen = [r for r in reps if r.paper_tag == "e113"][0]
    assert jensen.lhs_log == d * d
    assert jensen.passed


@pytest.mark.parametrize("d", [1, 2, 4])
def test_markov_monomial(d):
    rep = C.certify_markov(fm.monomial([d]), 1.0, math.e)
    assert rep.passed
    assert abs(rep.params["d"] - d) < 1e-9
    assert abs(rep.lhs_log - math.log(d)) < 1e-9


def test_markov_constant():
    rep = C.certify_markov(fm.const(2.0, 1), 1.0, 3.0)
    assert rep.passed and rep.params["d"] == 0


def test_markov_iter_subreport():
    rep = C.certify_markov(fm.poly1d([1, 0.01, 0.002]), 1.0, math.e)
    tags = {s.paper_tag: s for s in rep.sub_reports}
    assert "iter" in tags and tags["iter"].passed


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_markov_random_property(seed):
    rng = np.random.default_rng(seed)
    deg = int(rng.integers(0, 7))
    c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
    rep = C.certify_markov(fm.poly1d(c), 1.0, math.e)
    assert rep.passed
    kap = [s for s in rep.sub_reports if s.paper_tag == "kap1"]
    assert all(s.passed for s in kap)


def test_te13_exp_instance():
    reps = C.certify_te13_instance(EXP, W, 4, 2.0, 0.5, 1.0, 1.0)
    tags = [r.paper_tag for r in reps]
    assert tags == ["te13a", "te13b", "te13c", "te13d", "te13e", "te13f"]
    c = reps[2]
    at = [s for s in c.sub_reports if s.params["r"] == 2.0][0]
    assert abs(at.params["increment"] - (math.e - 1) * 2.0) < 1e-9
    assert reps[4].status == "diagnostic"
    assert all(r.passed for i, r in enumerate(reps) if i != 4)


def test_te13_polynomial_g_caps():
    g = fm.poly({(0, 2): 1.0, (1, 1): 0.5})
    reps = C.certify_te13_instance(EXP, g, 4, 1.0, 0.5, 1.0, 1.0)
    p, q = reps[0].params["p"], reps[0].params["q"]
    assert p <= 4 and q <= 4


def test_te14_probe():
    rep = C.probe_te14_condition(EXP, 1.0, [1.0, 2.0, 3.0, 4.0])
    assert rep.status == "diagnostic"
    ratios = rep.data["condition_I_ratio"]
    assert all(math.isfinite(x) for x in ratios)
    assert abs(ratios[0] - 10.0) < 1e-6
    assert C.probe_te14_condition(Z2, 1.0, [1.0]).status == "excluded"
    ee = fm.ExpOf(fm.ExpPoly(1, ((fm.const(1.0, 1), (1.0,)),)))
    rep = C.probe_te14_condition(ee, math.inf, [0.5, 1.0, 1.5])
    assert len(rep.data["condition_II_values"]) == 3


@pytest.mark.parametrize("d", range(1, 9))
def test_ex1_constant_chain(d):
    rep = C.ex1_chain(d)
    assert rep.passed and rep.paper_tag == "eq21"


@pytest.mark.parametrize("d", [1, 2, 3])
def test_sharpness_bracket(d):
    rep = C.sharpness_witness(d)
    assert abs(rep.lhs_log - d * d * math.log(9)) < 1e-6
    assert rep.passed


def test_cellset_validation():
    cs = C.grid_cells_in_ball(1, 1.0, 0.25)
    cs.validate()
    assert 0 < cs.measure_ratio() < 1
    with pytest.raises(ValueError):
        C.CellSet(1, (0j,), 1.0, 0.25, ((3, 3), (3, 3))).validate()


def test_te2_and_cartan_wrappers():
    F = fm.monomial([2], 1 / 16)
    reps, w = C.certify_te2_instance(F, 4.0, M=4.0 ** -4)
    assert [r.paper_tag for r in reps] == ["te2", "le1", "e213", "e214"]
    assert all(r.passed for r in reps)
    reps = C.certify_cartan(F, 1.0, 4.0)
    assert all(r.passed for r in reps)
    rep = C.certify_cartan_cover(F, 1.0, 0.25, 0.5, 0.5)
    assert rep.passed


def test_te2_rejects_unnormalised():
    with pytest.raises(K.ParameterRangeError):
        C.certify_te2_instance(fm.monomial([2]), 4.0)
