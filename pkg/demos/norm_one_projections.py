"""
Norm-one projections onto isometric images
==========================================

Three constructions cover the cases in which a projection of norm one
onto ``L(C^n)`` is guaranteed, and a linear program measures how far off
the best projection is when none exists.
"""

import numpy as np

from holoretract import (Euclidean, Sup, min_projection_norm, project_hilbert, property_v_c0,
                         property_v_supsource, support_index_certificate)

# Euclidean target: the orthogonal projection
u = np.array([[1], [1]]) / np.sqrt(2)
print("orthogonal:\n", project_hilbert(u, Euclidean(2)).pi.real)

# sup-normed source: extend each coordinate functional with minimal norm
L = np.array([[1], [0.5]])
b = property_v_supsource(L, Sup(2))
print("extension route:\n", b.pi.real, "\nnorm", b.norm_certificate.value)

# polydisk to polydisk: read the projection off the support indices
M = np.array([[0, 1j], [1, 0], [0.25, -0.5]])
cert = support_index_certificate(M)
print("support rows j(k):", cert.j_of_k, "phases:", cert.lambda_k)
c0 = property_v_c0(M, cert)
print("support-index route:\n", np.round(c0.pi, 3), "\nrow sums", np.abs(c0.pi).sum(axis=1))

# both routes give certified norm-one projections; they need not coincide
ext = property_v_supsource(M, Sup(3))
print("extension route on the same map, norm", ext.norm_certificate.value)

# without an isometry from a polydisk, the best projection can exceed 1
mp = min_projection_norm([[1, 0, 1], [0, 1, 1]], Sup(3))
print(f"minimal projection norm onto {{(x, y, x + y)}}: {mp.value:.6f} in [{mp.lower:.6f}, {mp.upper:.6f}]")
