"""Ready-made problem instances used by the CLI, the demos and the tests."""

import numpy as np

from .holomap import Compose, Moebius, Polynomial
from .norms import Pullback, Sup

#: the map (x, y) -> (x, y, x + y) and the norm it induces on C^2
COUNTEREXAMPLE_L = np.array([[1, 0], [0, 1], [1, 1]], dtype=complex)


def counterexample_norm():
    return Pullback(COUNTEREXAMPLE_L, Sup(3))


def parabola_map():
    """``z -> (z, z^2 / 2)`` from the disk into the bidisk."""
    return Polynomial(1, 2, {(1,): [1, 0], (2,): [0, 0.5]})


def bidisk_embedding():
    """``(z1, z2) -> (z1, z2, (z1 + z2)/4 + (z1^2 + z2^2)/4)``, origin-fixing, into the 3-disk.

    Its derivative at 0 is a sup-norm isometry (row sums 1, 1, 1/2) and the
    third component stays below ``1/2 + 1/2`` in modulus.
    """
    return Polynomial(2, 3, {
        (1, 0): [1, 0, 0.25],
        (0, 1): [0, 1, 0.25],
        (2, 0): [0, 0, 0.25],
        (0, 2): [0, 0, 0.25],
    })


OFFCENTER_A = np.array([0.3, -0.2j])
OFFCENTER_B = np.array([0.1, 0.2, -0.1j])


def offcenter_map(a=OFFCENTER_A, b=OFFCENTER_B):
    """``Moebius(b) o F o Moebius(-a)``: sends ``a`` to ``b`` with an isometric derivative there."""
    a = np.asarray(a, dtype=complex)
    return Compose((Moebius(b), bidisk_embedding(), Moebius(-a)))
