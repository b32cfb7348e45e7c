"""Exact computer-algebra checks for Ribet-type lemmas.

Submodules:

* ``rings``: coefficient rings ZZ, QQ, ZZ/p^n, products and fiber products.
* ``poly``: sparse multivariate polynomials and the formal variable table.
* ``groebner``: Buchberger bases over QQ and GF(p).
* ``matrices``: 2x2 and square matrices over any ring.
* ``fitting``: Smith/Howell forms and Fitting ideals.
* ``numeric``: finite representations, the module rho(Delta)/rho(Delta^2), the lattice recursion.
* ``formal``: the universal relation ring and membership certificates.
* ``koszul``: Koszul and tensor-word complexes, graded exactness.
* ``checks`` / ``cli``: scenario runner and command line.
"""

from .checks import CATALOG, RunOptions, list_checks, run_scenario
from .rings import RingSpec, ideal_in_ring, make_ring

__version__ = "0.1.0"

__all__ = ["CATALOG", "RunOptions", "RingSpec", "ideal_in_ring", "list_checks", "make_ring",
           "run_scenario", "__version__"]
