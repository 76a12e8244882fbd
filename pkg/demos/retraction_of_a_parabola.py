"""
A holomorphic retraction onto a curve in the bidisk
===================================================

The disk embeds in the bidisk by ``z -> (z, z^2/2)``; its derivative at 0
is an isometry and the first-coordinate projection has norm one. Writing
the image as a graph over the range of the derivative produces a
retraction ``r`` of the bidisk onto the curve.
"""

import numpy as np

from holoretract import Sup, build_retraction, evaluate, property_v_supsource
from holoretract.fixtures import parabola_map

f = parabola_map()
pi = property_v_supsource(np.array([[1.0], [0.0]]), Sup(2))
bundle = build_retraction(f, Sup(1), Sup(2), pi)

for name, value in bundle.verification["residuals"].items():
    print(f"{name:24s} {value:.2e}")
print("Cartan check:", bundle.verification["linearity"])

y = np.array([0.4 - 0.2j, -0.7j])
print("r(y) =", evaluate(bundle.r, y), " expected", np.array([y[0], y[0] ** 2 / 2]))
print("g(y) =", evaluate(bundle.g, y))
