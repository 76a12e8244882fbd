"""JSON encodings for scalars, vectors, matrices, norms and maps.

Complex scalars are ``[re, im]`` pairs, matrices are row-major nested
lists of pairs. Python's float repr makes the round trip bit-exact for
finite doubles.
"""

import json

import numpy as np

from .holomap import Compose, Identity, Linear, Moebius, Polynomial, Sum
from .norms import Euclidean, Polyhedral, Pullback, Sup


def scalar_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def scalar_from_json(p):
    if isinstance(p, (int, float)):
        return complex(p)
    re, im = p
    return complex(float(re), float(im))


def vector_to_json(v):
    return [scalar_to_json(z) for z in np.asarray(v, dtype=complex).ravel()]


def vector_from_json(data):
    return np.array([scalar_from_json(p) for p in data], dtype=complex)


def matrix_to_json(A):
    A = np.asarray(A, dtype=complex)
    return [vector_to_json(row) for row in A]


def matrix_from_json(data):
    rows = [vector_from_json(r) for r in data]
    if not rows:
        return np.zeros((0, 0), dtype=complex)
    return np.array(rows, dtype=complex)


def norm_to_json(N):
    if isinstance(N, Sup):
        return {"kind": "sup", "dim": N.dim}
    if isinstance(N, Euclidean):
        return {"kind": "euclidean", "dim": N.dim}
    if isinstance(N, Polyhedral):
        return {"kind": "polyhedral", "functionals": matrix_to_json(N.functionals)}
    if isinstance(N, Pullback):
        return {"kind": "pullback", "map": matrix_to_json(N.map), "inner": norm_to_json(N.inner)}
    raise TypeError(f"cannot serialize {N!r}")


def norm_from_json(d):
    kind = d["kind"]
    if kind == "sup":
        return Sup(int(d["dim"]))
    if kind == "euclidean":
        return Euclidean(int(d["dim"]))
    if kind == "polyhedral":
        return Polyhedral(matrix_from_json(d["functionals"]))
    if kind == "pullback":
        return Pullback(matrix_from_json(d["map"]), norm_from_json(d["inner"]))
    raise ValueError(f"unknown norm kind {kind!r}")


def map_to_json(m):
    if isinstance(m, Linear):
        return {"kind": "linear", "matrix": matrix_to_json(m.matrix)}
    if isinstance(m, Polynomial):
        terms = [{"alpha": list(a), "coeff": vector_to_json(c)} for a, c in m.terms.items()]
        return {"kind": "polynomial", "dim_in": m.dim_in, "dim_out": m.dim_out, "terms": terms}
    if isinstance(m, Moebius):
        return {"kind": "moebius", "a": vector_to_json(m.a)}
    if isinstance(m, Compose):
        return {"kind": "compose", "items": [map_to_json(i) for i in m.items]}
    if isinstance(m, Sum):
        return {"kind": "sum", "items": [map_to_json(i) for i in m.items]}
    if isinstance(m, Identity):
        return {"kind": "identity", "dim": m.dim}
    raise TypeError(f"cannot serialize {m!r}")


def map_from_json(d):
    kind = d["kind"]
    if kind == "linear":
        return Linear(matrix_from_json(d["matrix"]))
    if kind == "polynomial":
        terms = {tuple(t["alpha"]): vector_from_json(t["coeff"]) for t in d["terms"]}
        return Polynomial(int(d["dim_in"]), int(d["dim_out"]), terms)
    if kind == "moebius":
        return Moebius(vector_from_json(d["a"]))
    if kind == "compose":
        return Compose(tuple(map_from_json(i) for i in d["items"]))
    if kind == "sum":
        return Sum(tuple(map_from_json(i) for i in d["items"]))
    if kind == "identity":
        return Identity(int(d["dim"]))
    raise ValueError(f"unknown map kind {kind!r}")


def dumps(obj):
    """Canonical encoding used for every report (sorted keys, no NaN)."""
    return json.dumps(obj, sort_keys=True, allow_nan=False, indent=2)
