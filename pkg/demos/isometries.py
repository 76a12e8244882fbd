"""
Deciding whether a linear map is an isometry
============================================

Between polydisk norms the answer is exact: every row of the matrix has
absolute sum at most one and every column has an entry of modulus one.
Other norm pairs are sampled and refined locally.
"""

import numpy as np

from holoretract import Pullback, Sup, isometry_check

L = np.array([[1, 0], [0, 1], [1, 1]], dtype=complex)

# (x, y) -> (x, y, x + y) doubles the norm of (1, 1)
verdict = isometry_check(L, Sup(2), Sup(3))
print("sup source:", verdict.is_isometry, "witness", verdict.witness, "deviation", verdict.max_deviation)

# with the norm pulled back through L it is an isometry by construction
verdict = isometry_check(L, Pullback(L, Sup(3)), Sup(3))
print("pullback source:", verdict.is_isometry, "deviation", verdict.max_deviation)

# a typical polydisk isometry: a unimodular entry per column, row sums <= 1
M = np.array([[0, 1j], [1, 0], [0.25, -0.5]])
print("padded permutation:", isometry_check(M, Sup(2), Sup(3)).is_isometry)
