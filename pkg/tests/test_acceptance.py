"""Acceptance criteria 1-13, one test each.

Every test records a ``criterion N: PASS|FAIL ...`` line that the
terminal summary prints after the run (see ``conftest.py``).  Run alone
with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import contextlib
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from holgraph import certifier as C
from holgraph import cli
from holgraph import constants as K
from holgraph import funcmodel as fm
from holgraph import geometry as G
from holgraph import oracle as O
from holgraph import transcendence as T
from holgraph.modulus import disk, max_modulus, min_modulus_circle, three_circle_check
from holgraph.quantities import n_f_quantity
from holgraph.zeros import count_zeros, valency, valency_lower_bound, vp_zero_bound

from conftest import ACCEPTANCE_LINES, CORPUS, CORPUS_1D, coeffs_of, exp_lin, random_poly

DEMOS = Path(__file__).resolve().parent.parent / "demos" / "configs"


@contextlib.contextmanager
def criterion(num: int, title: str, limit: float):
    """Time the block, enforce the time limit and record the summary line."""
    info: dict = {}
    t0 = time.perf_counter()
    try:
        yield info
        elapsed = time.perf_counter() - t0
        assert elapsed < limit, f"took {elapsed:.1f} s (limit {limit:g} s)"
    except BaseException as exc:
        elapsed = time.perf_counter() - t0
        ACCEPTANCE_LINES[num] = (f"criterion {num:2d}: FAIL  {title} ({elapsed:.2f} s) "
                                 f"{type(exc).__name__}: {exc}")
        raise
    detail = info.get("detail", "")
    ACCEPTANCE_LINES[num] = (f"criterion {num:2d}: PASS  {title} ({elapsed:.2f} s"
                             f"{', ' + detail if detail else ''})")


def test_c01_constants():
    with criterion(1, "constants a1(9), a2(9)", 1.0) as info:
        a1, a2 = K.a1(9.0), K.a2(9.0)
        assert abs(a1 - 506.25) <= 1e-9
        assert abs(a2 - (576 + 162 * math.log(54 * math.e)) / 16) <= 1e-9
        assert round(a2, 3) == 86.513
        assert a2 < K.C1_EX1 == 87 and a1 < K.C2_EX1 == 510
        info["detail"] = f"a1={a1:.9g}, a2={a2:.9g}"


def test_c02_nf_homogeneous():
    with criterion(2, "N_f(r,9) = d for homogeneous f", 30.0) as info:
        cases = 0
        for d in range(1, 6):
            fs = [fm.monomial([d]),
                  fm.poly({(d, 0): 1.0, (0, d): 1.0}),
                  fm.poly({(d, 0): 1.0, (d - 1, 1): 0.5, (0, d): -0.3})]
            for f in fs:
                assert n_f_quantity(f, 1.0, 9.0).N_f == d, (d, f.nvars)
                cases += 1
        info["detail"] = f"{cases} instances"


def _bidegree(d: int, k: int, l: int, r: float = 1.0) -> tuple[fm.Poly, fm.Poly]:
    c = 0.5 / (9 * r) ** k
    return fm.monomial([d]), fm.poly({(0, l): 1.0, (k, l): c})


def test_c03_sharpness_and_bidegree():
    with criterion(3, "sharpness ratio d^2 ln 9, bidegree te1, degenerate regime", 60.0) as info:
        worst = 0.0
        for d in range(1, 6):
            rep = C.sharpness_witness(d)
            err = abs(rep.lhs_log - d * d * math.log(9))
            assert err <= 1e-6, (d, err)
            assert rep.passed
            worst = max(worst, err)
        for d, k, l in [(4, 1, 1), (5, 1, 2), (8, 2, 1)]:
            assert k <= d / 4
            f, g = _bidegree(d, k, l)
            sup, growth = C.certify_te1(f, g, 1.0, 9.0)
            assert sup.status == growth.status == "pass", (d, k, l)
        f = fm.monomial([3])
        g = (fm.monomial([0, 1]) - fm.monomial([3, 0])) * (fm.const(1.0, 2) + 0.5 * fm.monomial([0, 1]))
        sup, _ = C.certify_te1(f, g, 1.0, 9.0)
        assert sup.status == "degenerate"
        info["detail"] = f"max ratio error {worst:.1e}"


def test_c04_zero_count_oracle():
    with criterion(4, "argument principle = companion count (200 polys)", 10.0) as info:
        rng = np.random.default_rng(4)
        done = skipped = 0
        while done < 200:
            p = random_poly(rng, 8)
            roots = O.poly_roots(coeffs_of(p))
            if np.min(np.abs(np.abs(roots) - 1.0)) < 1e-6:
                skipped += 1
                continue
            assert count_zeros(p, disk(1.0)).count == int(np.sum(np.abs(roots) < 1.0))
            done += 1
        info["detail"] = f"200/200 exact, {skipped} near-boundary draws redrawn"


def _random_exp_poly(rng) -> fm.Expr:
    out = None
    for _ in range(int(rng.integers(1, 4))):
        deg = int(rng.integers(0, 4))
        lam = complex(*rng.uniform(-2, 2, 2))
        c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
        term = fm.ExpPoly(1, ((fm.poly1d(c), (lam,)),))
        out = term if out is None else out + term
    return out


def test_c05_max_modulus_oracle():
    with criterion(5, "max modulus vs 1e5 grid (100 functions)", 60.0) as info:
        rng = np.random.default_rng(5)
        worst = 0.0
        for i in range(100):
            f = random_poly(rng, 8) if i < 60 else _random_exp_poly(rng)
            r = float(rng.uniform(0.5, 2.0))
            got = max_modulus(f, disk(r)).log_value
            ref = O.grid_max(f, 0j, r, density=100_000)
            err = abs(got - ref) / max(1.0, abs(ref))
            worst = max(worst, err)
            assert err <= 1e-6, (i, got, ref)
        info["detail"] = f"worst relative error {worst:.1e}"


def test_c06_hadamard_suite():
    with criterion(6, "three-circle and log-convexity consequences on corpus", 30.0) as info:
        worst = math.inf
        n = 0
        for name, f in CORPUS.items():
            for radii in [(0.5, 1.0, 2.0), (1.0, 2.0, 6.0), (0.1, 0.7, 3.5), (2.0, 3.0, 9.0)]:
                rep = three_circle_check(f, None, *radii)
                for r in [rep] + list(rep.sub_reports):
                    assert r.margin_log >= -1e-9, (name, radii, r.name)
                    worst = min(worst, r.margin_log)
                n += 1
        info["detail"] = f"{n} checks, min margin {worst:.2e}"


def test_c07_vp_and_le41():
    with criterion(7, "VP bound >= zero count, le41 bound <= valency on corpus", 30.0) as info:
        n = 0
        for name, h in CORPUS_1D.items():
            R, beta = 2.5, 0.5
            assert min_modulus_circle(h, beta * R).log_value > -20
            assert vp_zero_bound(h, R, beta) >= count_zeros(h, disk(beta * R)).count - 1e-9, name
            n += 1
            if fm.is_structurally_constant(h):
                continue
            for t, s in ((4.0, 4.0), (4.0, 16.0), (9.0, 81.0), (2.0, 50.0)):
                v = valency(h, disk(R / math.sqrt(t))).valency
                assert valency_lower_bound(h, R, t, s) <= v + 1e-9, (name, t, s)
                n += 1
        info["detail"] = f"{n} checks"


def test_c08_markov_suite():
    with criterion(8, "Markov inequality, kappa(d;e) < 9d, iteration lemma", 30.0) as info:
        rng = np.random.default_rng(8)
        thr = K.nf_threshold(math.e)
        iters = 0
        polys = [random_poly(rng, 6, min_deg=0) for _ in range(100)]
        polys += [fm.poly1d([1.0, 0.02 * rng.standard_normal(), 0.01j]) for _ in range(10)]
        for p in polys:
            rep = C.certify_markov(p, 1.0, math.e)
            assert rep.passed
            for sub in rep.sub_reports:
                assert sub.passed, sub.name
            if rep.params["d"] < thr:
                it = [s for s in rep.sub_reports if s.paper_tag == "iter"]
                assert it and all(s.passed for s in it)
                iters += 1
        for d in np.geomspace(1e-3, 1e3, 200):
            assert K.kappa(d, math.e) < 9 * d
        info["detail"] = f"{len(polys)} polynomials, {iters} iteration checks"


_C9: dict[int, str] = {}


def _closed_form_roots(d: int, a: complex) -> np.ndarray:
    base = 4 * complex(a) ** (1 / d)
    return base * np.exp(2j * np.pi * np.arange(d) / d)


@pytest.mark.parametrize("d", [2, 3])
def test_c09_te2_instance(d):
    with criterion(9, "line-graph intersections for (z/4)^d, d=2,3", 10.0) as info:
        t = 4.0
        F = fm.monomial([d], t ** -d)
        reps, w = C.certify_te2_instance(F, t, M=t ** (-2 * d))
        assert all(r.passed for r in reps), [(r.name, r.status) for r in reps]
        pts = np.asarray(w.intersection_points)
        assert pts.size >= d
        thr = w.s * (t - 1) / math.sqrt(w.lambda_t)
        assert abs(thr - w.separation_threshold) <= 1e-12 * thr
        assert w.min_pairwise_distance > thr
        exact = _closed_form_roots(d, w.c + w.y + w.c_ys)
        for p in pts:
            assert np.min(np.abs(exact - p)) <= 1e-9 * abs(p)
        assert count_zeros(fm.diff(F, 0), disk(1.0)).count < w.lambda_t
        _C9[d] = f"d={d}: {pts.size} points, separation {w.min_pairwise_distance:.2e} > {thr:.2e}"
        info["detail"] = "; ".join(_C9[k] for k in sorted(_C9))


def test_c10_cartan_good_circle():
    with criterion(10, "good circle vs 1e4-sample oracle, cart2 cover", 30.0) as info:
        t = 4.0
        out = []
        for d in (2, 3):
            F = fm.monomial([d], t ** -d)
            M = t ** (-2 * d)
            c, _, _ = G.find_center_c(F, t)
            gc = G.good_circle(F - c, t, M)
            assert 1 / math.sqrt(t) - 1e-12 <= gc.level <= 1.0
            assert gc.min_modulus_log >= math.log(2) + K.log_r0(t, M)
            ref = O.circle_grid_min(F - c, 0j, gc.level, density=10_000)
            assert abs(gc.min_modulus_log - ref) <= 1e-6 * max(1.0, abs(ref))
            H = (math.sqrt(t) - 1) / (4 * t ** 1.5)
            cov = G.cartan_cover_cart2(F, 1.0, t, H)
            assert cov.violations == 0
            out.append(f"d={d}: l={gc.level:.4f}, {cov.samples_checked} samples")
        info["detail"] = "; ".join(out)


def test_c11_te12_chain():
    with criterion(11, "chain bound for a monomial pair; k=1 equals main theorem", 30.0) as info:
        f1, f2 = fm.monomial([2]), fm.monomial([3])
        g = fm.poly({(0, 0, 0): 1.0, (0, 0, 1): 1.0})
        a, b = C.certify_te12([f1, f2], g, 1.0, 9.0)
        assert a.status == b.status == "pass"
        g1 = fm.monomial([0, 1])
        c, d = C.certify_te12([f1], g1, 1.0, 9.0)
        e, f = C.certify_te1(f1, g1, 1.0, 9.0)
        assert abs(c.margin_log - e.margin_log) <= 1e-12
        assert abs(d.margin_log - f.margin_log) <= 1e-12
        info["detail"] = f"pair margins {a.margin_log:.4g}, {b.margin_log:.4g}"


def test_c12_transcendence():
    with criterion(12, "flat polynomials for e^z, k=6..12", 120.0) as info:
        f = fm.ExpOf(fm.var(0, 1))
        data = T.tau_bounds(f, range(6, 13))
        for row in data.per_k:
            k = row["k"]
            assert row["p_k"] == k * k // 3
            assert T.d_kn(row["p_k"], 1) < T.d_kn(k, 2)
            assert row["flatness_residual"] < 1e-10
            assert row["mk_flat"] >= row["p_k"] + 1 - 1e-9
            assert row["mk"] / k ** 2 >= 1 / 3 - 0.05
        worst = min(row["mk"] / row["k"] ** 2 for row in data.per_k)
        assert data.trend_ok
        info["detail"] = f"min trend {worst:.4f} >= {1 / 3 - 0.05:.4f}"


def test_c13_determinism(tmp_path):
    with criterion(13, "byte-identical reports for a repeated seeded run", 120.0) as info:
        cfg = DEMOS / "acceptance.json"
        for sub, jobs in (("a", "1"), ("b", "3")):
            code = cli.main(["run", str(cfg), "--out", str(tmp_path / sub), "--seed", "7",
                             "--jobs", jobs])
            assert code == 0
        for ext in ("json", "csv"):
            a = (tmp_path / "a" / f"acceptance.report.{ext}").read_bytes()
            b = (tmp_path / "b" / f"acceptance.report.{ext}").read_bytes()
            assert a == b, ext
        info["detail"] = f"{len(a)} csv bytes identical"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
