"""Growth and zero-distribution certificates for holomorphic functions on graphs.

The central object is the restriction ``g_f(z) = g(z, f(z))`` of a function
``g`` on ``C^{n+1}`` to the graph of an entire ``f``.  Submodules:

``funcmodel``
    expression trees (polynomials, exponential polynomials, compositions)
``modulus``, ``zeros``, ``oracle``
    maximum modulus, zero counts, valency and brute-force cross-checks
``constants``, ``quantities``
    named constants, ``N_f`` and the class parameters ``p, q``
``certifier``, ``geometry``, ``transcendence``
    inequality certificates, Cartan covers and flat polynomials
``cli``
    batch runner producing JSON/CSV reports
"""

from . import (certifier, constants, funcmodel, geometry, modulus, oracle, quantities, reports,
               transcendence, zeros)
from .certifier import (certify_corollaries, certify_example_ex1, certify_markov, certify_te1,
                        certify_te12, certify_te13_instance, probe_te14_condition,
                        sharpness_witness)
from .constants import ParameterRangeError, eval_constants
from .funcmodel import ExpOf, ExpPoly, Poly, graph_restriction, monomial, poly, poly1d
from .modulus import ball, disk, log_max, max_modulus
from .reports import CertReport
from .transcendence import flat_polynomial, mk_estimate, tau_bounds
from .zeros import count_zeros, valency

__version__ = "0.1.0"

__all__ = [
    "certifier", "constants", "funcmodel", "geometry", "modulus", "oracle", "quantities",
    "reports", "transcendence", "zeros",
    "certify_te1", "certify_corollaries", "certify_markov", "certify_te12",
    "certify_te13_instance", "probe_te14_condition", "certify_example_ex1",
    "sharpness_witness", "ParameterRangeError", "eval_constants", "Poly", "ExpPoly", "ExpOf",
    "poly", "poly1d", "monomial", "graph_restriction", "disk", "ball", "log_max",
    "max_modulus", "CertReport", "flat_polynomial", "mk_estimate", "tau_bounds",
    "count_zeros", "valency",
]
