"""Holomorphic maps between balls as expression trees.

Every node evaluates exactly (on single points or stacks of points of shape
``(..., dim_in)``), differentiates structurally, and composes without losing
closed form. The Möbius node acts componentwise,

    x_i  ->  (x_i + a_i) / (1 + conj(a_i) x_i),

and is an automorphism of the polydisk whenever ``max_i |a_i| < 1``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .linalg import as_matrix, as_vector


class MapExpr:
    """Base node; subclasses expose ``dim_in`` and ``dim_out``."""

    def __call__(self, x):
        return evaluate(self, x)

    def _eval(self, x):
        raise NotImplementedError

    def _jac(self, x):
        raise NotImplementedError

    def children(self):
        return ()


@dataclass(frozen=True, eq=False)
class Identity(MapExpr):
    dim: int

    @property
    def dim_in(self):
        return self.dim

    @property
    def dim_out(self):
        return self.dim

    def _eval(self, x):
        return x

    def _jac(self, x):
        return np.eye(self.dim, dtype=complex)


@dataclass(frozen=True, eq=False)
class Linear(MapExpr):
    matrix: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.matrix)
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @property
    def dim_in(self):
        return self.matrix.shape[1]

    @property
    def dim_out(self):
        return self.matrix.shape[0]

    def _eval(self, x):
        return x @ self.matrix.T

    def _jac(self, x):
        return self.matrix.copy()


@dataclass(frozen=True, eq=False)
class Polynomial(MapExpr):
    """Polynomial map ``x -> sum_alpha coeff_alpha * x**alpha``.

    ``terms`` maps multi-index tuples to coefficient vectors of length
    ``dim_out``.
    """

    dim_in: int
    dim_out: int
    terms: dict

    def __post_init__(self):
        alphas, coeffs = [], []
        for alpha, c in self.terms.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.dim_in or min(alpha) < 0:
                raise DimensionError(f"bad multi-index {alpha} for dim_in={self.dim_in}")
            alphas.append(alpha)
            coeffs.append(as_vector(c, self.dim_out))
        object.__setattr__(self, "terms", dict(zip(alphas, coeffs)))
        object.__setattr__(self, "_alphas", np.array(alphas, dtype=int).reshape(-1, self.dim_in))
        object.__setattr__(self, "_coeffs", np.array(coeffs, dtype=complex).reshape(-1, self.dim_out))

    @property
    def degree(self):
        return int(self._alphas.sum(axis=1).max()) if len(self._alphas) else 0

    def _monomials(self, x, alphas):
        return np.prod(x[..., None, :] ** alphas, axis=-1)

    def _eval(self, x):
        return self._monomials(x, self._alphas) @ self._coeffs

    def _jac(self, x):
        J = np.zeros((self.dim_out, self.dim_in), dtype=complex)
        for j in range(self.dim_in):
            mask = self._alphas[:, j] > 0
            if not np.any(mask):
                continue
            lowered = self._alphas[mask].copy()
            factor = lowered[:, j].astype(float)
            lowered[:, j] -= 1
            J[:, j] = (factor * self._monomials(x, lowered)) @ self._coeffs[mask]
        return J


@dataclass(frozen=True, eq=False)
class Moebius(MapExpr):
    a: np.ndarray

    def __post_init__(self):
        a = as_vector(self.a)
        if np.max(np.abs(a)) >= 1:
            raise DomainError(f"Möbius parameter must satisfy max|a_i| < 1, got {np.max(np.abs(a))}")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def dim_in(self):
        return self.a.shape[0]

    @property
    def dim_out(self):
        return self.a.shape[0]

    def _check(self, x):
        if np.any(np.abs(x) >= 1):
            raise DomainError("Möbius map evaluated outside the open polydisk")

    def _eval(self, x):
        self._check(x)
        return (x + self.a) / (1 + self.a.conj() * x)

    def _jac(self, x):
        self._check(x)
        return np.diag((1 - np.abs(self.a) ** 2) / (1 + self.a.conj() * x) ** 2)


@dataclass(frozen=True, eq=False)
class Compose(MapExpr):
    """``Compose([g, f])`` is ``g o f``: items apply right to left."""

    items: tuple

    def __post_init__(self):
        items = tuple(self.items)
        if not items:
            raise ValueError("empty composition")
        for outer, inner in zip(items[:-1], items[1:]):
            if outer.dim_in != inner.dim_out:
                raise DimensionError(
                    f"cannot compose {type(outer).__name__} (dim_in={outer.dim_in}) after "
                    f"{type(inner).__name__} (dim_out={inner.dim_out})")
        object.__setattr__(self, "items", items)

    @property
    def dim_in(self):
        return self.items[-1].dim_in

    @property
    def dim_out(self):
        return self.items[0].dim_out

    def children(self):
        return self.items

    def _eval(self, x):
        for m in reversed(self.items):
            x = m._eval(x)
        return x

    def _jac(self, x):
        J = np.eye(self.dim_in, dtype=complex)
        for m in reversed(self.items):
            J = m._jac(x) @ J
            x = m._eval(x)
        return J


@dataclass(frozen=True, eq=False)
class Sum(MapExpr):
    items: tuple

    def __post_init__(self):
        items = tuple(self.items)
        if not items:
            raise ValueError("empty sum")
        if len({(m.dim_in, m.dim_out) for m in items}) != 1:
            raise DimensionError("summands must share dim_in and dim_out")
        object.__setattr__(self, "items", items)

    @property
    def dim_in(self):
        return self.items[0].dim_in

    @property
    def dim_out(self):
        return self.items[0].dim_out

    def children(self):
        return self.items

    def _eval(self, x):
        return sum(m._eval(x) for m in self.items)

    def _jac(self, x):
        return sum(m._jac(x) for m in self.items)


def evaluate(m, x):
    """Value of ``m`` at ``x`` (a point or a stack of points)."""
    x = np.asarray(x, dtype=complex)
    if x.shape[-1:] != (m.dim_in,):
        raise DimensionError(f"map expects inputs of length {m.dim_in}, got shape {x.shape}")
    return m._eval(x)


def jacobian(m, x):
    """Complex Jacobian ``m'(x)`` as a ``(dim_out, dim_in)`` matrix."""
    x = as_vector(x, m.dim_in)
    return m._jac(x)


def moebius_automorphism(a):
    return Moebius(a)


def moebius_inverse(a):
    return Moebius(-as_vector(a))


def cauchy_nodes(order):
    """Trapezoid nodes per axis for coefficients of total degree ``order``."""
    return 2 ** math.ceil(math.log2(8 * (order + 1)))


def _torus_fft(m, radius, nodes, chunk=1 << 16):
    n = m.dim_in
    theta = 2 * np.pi * np.arange(nodes) / nodes
    circle = radius * np.exp(1j * theta)
    grids = np.meshgrid(*([circle] * n), indexing="ij")
    pts = np.stack(grids, axis=-1).reshape(-1, n)
    vals = np.empty((pts.shape[0], m.dim_out), dtype=complex)
    for s in range(0, pts.shape[0], chunk):
        vals[s:s + chunk] = evaluate(m, pts[s:s + chunk])
    vals = vals.reshape((nodes,) * n + (m.dim_out,))
    return np.fft.fftn(vals, axes=tuple(range(n))) / nodes ** n


def taylor_coeff(m, multi_index, radius=0.5):
    """Coefficient of ``x**multi_index`` in each output component.

    Tensor-product Cauchy integrals on circles of the given radius, computed
    by the trapezoid rule (an FFT) with ``cauchy_nodes(|alpha|)`` nodes per
    axis. Raises :class:`DomainError` when the torus leaves the domain.
    """
    alpha = tuple(int(a) for a in multi_index)
    if len(alpha) != m.dim_in or min(alpha) < 0:
        raise DimensionError(f"multi-index {alpha} does not match dim_in={m.dim_in}")
    if not radius > 0:
        raise DomainError("radius must be positive")
    order = sum(alpha)
    nodes = cauchy_nodes(order)
    F = _torus_fft(m, radius, nodes)
    return F[alpha] / radius ** order


def taylor_coefficients(m, max_order, radius=0.5, min_order=0):
    """All coefficients with ``min_order <= |alpha| <= max_order`` from one grid."""
    if not radius > 0:
        raise DomainError("radius must be positive")
    nodes = cauchy_nodes(max_order)
    F = _torus_fft(m, radius, nodes)
    out = {}
    for alpha in np.ndindex(*([max_order + 1] * m.dim_in)):
        k = sum(alpha)
        if min_order <= k <= max_order:
            out[alpha] = F[alpha] / radius ** k
    return out
