"""
The invariant metric of a ball at its center
============================================

At the center of the unit ball of a norm, the Carathéodory and Kobayashi
metrics both reduce to the norm itself. Away from the center of the
polydisk, a Möbius automorphism moves the base point back to the origin.
"""

import numpy as np

from holoretract import (Euclidean, Moebius, Polyhedral, Pullback, Sup, carath_origin,
                         carath_supball, evaluate, functional_lower_bound, jacobian)

# Four ways of writing a norm on C^n
L = np.array([[1, 0], [0, 1], [1, 1]], dtype=complex)
norms = [Sup(2), Euclidean(2), Polyhedral([[1, 0.5j], [0, 1]]), Pullback(L, Sup(3))]
v = np.array([1, 0.5])
for N in norms:
    # a norming functional gives a linear map to the disk, hence a lower bound
    print(f"{N!r:40s} metric {carath_origin(N, v):.6f}   lower bound {functional_lower_bound(N, v):.6f}")

# On the polydisk the metric at a is max |v_i| / (1 - |a_i|^2)
print("E(0.5, 1) =", carath_supball([0.5], [1]))

# Möbius maps are isometries of this metric
rng = np.random.default_rng(0)
a = np.array([0.3, -0.6j])
b = np.array([0.5, 0.2 + 0.2j])
w = rng.standard_normal(2) + 1j * rng.standard_normal(2)
phi = Moebius(b)
before = carath_supball(a, w)
after = carath_supball(evaluate(phi, a), jacobian(phi, a) @ w)
print(f"before {before:.12f}  after {after:.12f}")
