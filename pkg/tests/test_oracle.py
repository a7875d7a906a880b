import math

import numpy as np
import pytest

from holgraph import funcmodel as fm
from holgraph import oracle as O
from holgraph.zeros import count_zeros
from holgraph.modulus import disk

from conftest import coeffs_of, random_poly


@pytest.mark.parametrize("d, r", [(1, 0.5), (3, 2.0), (6, 1.3)])
def test_grid_max_monomial(d, r):
    assert abs(O.grid_max(fm.monomial([d]), 0j, r, density=4096) - d * math.log(r)) < 1e-12


def test_grid_max_exp():
    assert abs(O.grid_max(fm.ExpOf(fm.var(0, 1)), 0j, 1.5) - 1.5) < 1e-8


def test_poly_roots_examples():
    r = np.sort_complex(O.poly_roots([-0.25, 0, 1]))
    assert np.allclose(r, [-0.5, 0.5])
    cube = O.poly_roots([-1, 0, 0, 1])
    assert np.allclose(np.sort(np.angle(cube)), [-2 * math.pi / 3, 0, 2 * math.pi / 3])
    assert np.allclose(cube ** 3, 1)


def test_poly_roots_residuals_random(rng):
    for _ in range(20):
        c = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        roots = O.poly_roots(c)
        assert roots.size == 8
        assert np.all(np.abs(np.polyval(c[::-1], roots)) < 1e-8 * np.abs(c).sum()
                      * np.maximum(1, np.abs(roots)) ** 8)


def test_winding_count_examples():
    assert O.winding_count(fm.monomial([5])) == 5
    assert O.winding_count(fm.ExpOf(fm.var(0, 1))) == 0


def test_winding_equals_count_zeros(rng):
    done = 0
    while done < 200:
        p = random_poly(rng, 8)
        roots = O.poly_roots(coeffs_of(p))
        if np.min(np.abs(np.abs(roots) - 1.0)) < 1e-6:
            continue
        assert O.winding_count(p) == count_zeros(p, disk(1.0)).count
        done += 1


def test_oracle_imports_only_funcmodel():
    import ast
    import inspect
    tree = ast.parse(inspect.getsource(O))
    local = {n.names[0].name for n in ast.walk(tree)
             if isinstance(n, ast.ImportFrom) and n.level == 1}
    assert local <= {"funcmodel"}
