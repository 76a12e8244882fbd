"""Finite-dimensional complex normed spaces.

Four representations are supported: :class:`Sup` (the polydisk norm),
:class:`Euclidean`, :class:`Polyhedral` (``max_k |<f_k, x>|``) and
:class:`Pullback` (``||x|| = inner(M x)`` for an injective ``M``).

Covectors act by the bilinear pairing ``<g, x> = sum_j g_j x_j``; there is
no conjugation anywhere in the linear theory.

Internally every norm reduces to one of two normal forms: ``("poly", F)``
meaning ``||x|| = max |F x|`` or ``("euclid", M)`` meaning
``||x|| = ||M x||_2``. Dual and operator norms are computed on these forms.
"""

import heapq
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .convex import complex_l1_min
from .errors import DimensionError, NumericalFailure, RankDeficient
from .linalg import as_matrix, as_vector, pseudo_inverse, rank

DEFAULT_TOL = 1e-6


class Norm:
    """Base class. Instances are callable: ``N(x) == norm_eval(N, x)``."""

    kind = None

    def __call__(self, x):
        return norm_eval(self, x)

    def reduced(self):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Sup(Norm):
    dim: int
    kind = "sup"

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("dimension must be >= 1")

    def reduced(self):
        return "poly", np.eye(self.dim, dtype=complex)

    def __repr__(self):
        return f"Sup({self.dim})"


@dataclass(frozen=True, eq=False)
class Euclidean(Norm):
    dim: int
    kind = "euclidean"

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("dimension must be >= 1")

    def reduced(self):
        return "euclid", np.eye(self.dim, dtype=complex)

    def __repr__(self):
        return f"Euclidean({self.dim})"


@dataclass(frozen=True, eq=False)
class Polyhedral(Norm):
    """``||x|| = max_k |<f_k, x>|``; rows of ``functionals`` are the ``f_k``."""

    functionals: np.ndarray
    kind = "polyhedral"

    def __post_init__(self):
        F = as_matrix(self.functionals)
        if rank(F) < F.shape[1]:
            raise RankDeficient("functionals do not separate points; not a norm")
        F.setflags(write=False)
        object.__setattr__(self, "functionals", F)

    @property
    def dim(self):
        return self.functionals.shape[1]

    def reduced(self):
        return "poly", self.functionals

    def __repr__(self):
        return f"Polyhedral({self.functionals.shape[0]} functionals, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class Pullback(Norm):
    """``||x|| = inner(map @ x)``; ``map`` must be injective."""

    map: np.ndarray
    inner: Norm
    kind = "pullback"

    def __post_init__(self):
        M = as_matrix(self.map, (self.inner.dim, None))
        if rank(M) < M.shape[1]:
            raise RankDeficient("pullback map must be injective")
        M.setflags(write=False)
        object.__setattr__(self, "map", M)

    @property
    def dim(self):
        return self.map.shape[1]

    def reduced(self):
        form, X = self.inner.reduced()
        return form, X @ self.map

    def __repr__(self):
        return f"Pullback({self.map.shape[0]}x{self.map.shape[1]}, {self.inner!r})"


def _check_dim(N, x):
    x = np.asarray(x, dtype=complex)
    if x.shape[-1:] != (N.dim,):
        raise DimensionError(f"{N!r} expects vectors of length {N.dim}, got shape {x.shape}")
    return x


def norm_eval(N, x):
    """Norm of ``x``; accepts a single vector or a stack of shape ``(..., dim)``."""
    x = _check_dim(N, x)
    if isinstance(N, Sup):
        out = np.abs(x).max(axis=-1)
    elif isinstance(N, Euclidean):
        out = np.linalg.norm(x, axis=-1)
    elif isinstance(N, Polyhedral):
        out = np.abs(x @ N.functionals.T).max(axis=-1)
    elif isinstance(N, Pullback):
        out = norm_eval(N.inner, x @ N.map.T)
    else:
        raise TypeError(f"unknown norm {N!r}")
    return float(out) if np.ndim(out) == 0 else out


def norming_functional(N, v):
    """Covector ``g`` with dual norm <= 1 and ``<g, v> = ||v||``."""
    v = as_vector(_check_dim(N, v))
    form, X = N.reduced()
    if not np.any(v):
        return np.zeros(N.dim, dtype=complex)
    if form == "poly":
        vals = X @ v
        k = int(np.argmax(np.abs(vals)))
        return X[k] * np.exp(-1j * np.angle(vals[k]))
    w = X @ v
    return (w.conj() / np.linalg.norm(w)) @ X


@dataclass
class DualNorm:
    value: float
    lower: float
    upper: float
    # primal vector of norm 1 (or 0); attains ``lower`` exactly for Sup and
    # Euclidean forms and to roughly the LP tolerance otherwise
    witness: np.ndarray

    @property
    def exact(self):
        return self.lower == self.upper


def _witness_value(N, g, x):
    nx = norm_eval(N, x)
    if nx == 0:
        return 0.0, x
    x = x / nx
    return abs(g @ x), x


def dual_norm_certificate(N, g, tol=DEFAULT_TOL, budget=500):
    """Dual norm ``sup{|<g, x>| : ||x|| <= 1}`` with a bracket and witness."""
    g = as_vector(g, N.dim)
    if not np.any(g):
        return DualNorm(0.0, 0.0, 0.0, np.zeros(N.dim, dtype=complex))
    if isinstance(N, Sup):
        val = float(np.abs(g).sum())
        x = np.exp(-1j * np.angle(g))
        return DualNorm(val, val, val, x)
    form, X = N.reduced()
    if form == "euclid":
        w = pseudo_inverse(X.T) @ g
        val = float(np.linalg.norm(w))
        x = pseudo_inverse(X) @ (w.conj() / val)
        return DualNorm(val, val, val, x)

    c, sol = complex_l1_min(X.T, g, tol=tol, budget=budget)
    n = N.dim
    y = sol.eq_marginals[:n] + 1j * sol.eq_marginals[n:]
    # complementary slackness: c_k != 0 forces <X_k, x> = conj(phase(c_k))
    S = np.abs(c) > 1e-9 * np.abs(c).max()
    target = np.exp(-1j * np.angle(c[S]))
    polished = y + pseudo_inverse(X[S]) @ (target - X[S] @ y)
    best_val, best_x = 0.0, np.zeros(n, dtype=complex)
    for cand in (polished, y, y.conj()):
        val, x = _witness_value(N, g, cand)
        if val > best_val:
            best_val, best_x = val, x
    lower = max(sol.lower, best_val)
    return DualNorm(sol.upper, min(lower, sol.upper), sol.upper, best_x)


def dual_norm_eval(N, g, tol=DEFAULT_TOL):
    """Dual norm of the covector ``g`` (certified to ``tol`` for LP-backed kinds)."""
    return dual_norm_certificate(N, g, tol).value


@dataclass
class OperatorNorm:
    value: float
    witness: np.ndarray
    exact: bool
    lower: float = field(default=None)
    upper: float = field(default=None)

    def __post_init__(self):
        if self.lower is None:
            self.lower = self.value
        if self.upper is None:
            self.upper = self.value

    def __iter__(self):
        # allows ``value, witness, exact = operator_norm(...)``
        return iter((self.value, self.witness, self.exact))


def _quad_bound(Q, absQ, z, h):
    """Upper bound of ``z^H Q z`` over the phase box around ``z`` (half-widths ``h``)."""
    w = Q @ z
    val = float(np.real(z.conj() @ w))
    grad = 2 * np.imag(z.conj() * w)
    rem = 0.5 * np.sum(absQ * (h[:, None] + h[None, :]) ** 2)
    return val + np.abs(grad) @ h + rem, val, grad


def _polydisk_to_l2(C, tol, budget, G=None, lo=0.0):
    """Bracket ``max ||C z||_2`` over torus points ``z`` with ``|G z|_inf <= 1``.

    Without ``G`` this is the maximum over the closed polydisk, which sits
    on the torus ``|z_j| = 1``. Branch and bound over the phases (first
    phase pinned to 0) with second-order Taylor bounds. With constraints,
    boxes that are provably infeasible are dropped and the bound on the
    rest is the better of the plain one and the Lagrangian
    ``z^H (Q - sum_r l_r G_r^H G_r) z + sum_r l_r`` with multipliers ``l >= 0``
    fitted to the gradients at the box center; the latter keeps the bound
    tight when the maximum lies on the boundary of the feasible set.
    Every candidate ``z`` scores ``||C z|| / max(1, |G z|_inf)``, a valid lower
    bound. Returns ``(lower, upper, z_best)``, ``lower`` at least the
    incoming ``lo`` (``z_best`` is None if no candidate beat it).
    """
    m, n = C.shape
    G = np.zeros((0, n), dtype=complex) if G is None else G
    absG = np.abs(G)
    Q = C.conj().T @ C
    absQ = np.abs(Q)
    np.fill_diagonal(absQ, 0.0)
    Gq = [np.outer(g.conj(), g) for g in G]

    def score(z):
        gz = np.abs(G @ z).max() if len(G) else 0.0
        return float(np.linalg.norm(C @ z)) / max(1.0, gz)

    zbest = None
    if n == 1 or not np.any(C):
        z = np.ones(n, dtype=complex)
        v = score(z)
        if v > lo:
            lo, zbest = v, z
        return lo, lo, zbest

    def phases(center):
        return np.exp(1j * np.concatenate([[0.0], center]))

    def bound(center, h):
        z = phases(center)
        hh = np.concatenate([[0.0], h])
        if len(G) and np.any(np.abs(G @ z) - absG @ hh > 1):
            return -np.inf, z
        ub, _, grad = _quad_bound(Q, absQ, z, hh)
        if len(G):
            grads = np.array([_quad_bound(P, np.zeros_like(absQ), z, hh)[2] for P in Gq])
            lam, _ = nnls(grads.T, grad)
            if np.any(lam > 0):
                L = Q - np.tensordot(lam, np.array(Gq), axes=1)
                absL = np.abs(L)
                np.fill_diagonal(absL, 0.0)
                ub = min(ub, _quad_bound(L, absL, z, hh)[0] + lam.sum())
        return ub, z

    def ascend(z):
        # fixed-point iteration z <- phase(Q z) never decreases ||C z||
        for _ in range(50):
            w = Q @ z
            aw = np.abs(w)
            znew = np.where(aw > 0, w / np.where(aw > 0, aw, 1.0), z)
            if np.abs(znew - z).max() <= 1e-15:
                break
            z = znew
        return z

    rng = np.random.default_rng(0)
    for start in [np.ones(n)] + [np.exp(2j * np.pi * rng.random(n)) for _ in range(16)]:
        for z in (np.asarray(start, dtype=complex), ascend(np.asarray(start, dtype=complex))):
            v = score(z)
            if v > lo:
                lo, zbest = v, z

    center0 = np.full(n - 1, np.pi)
    h0 = np.full(n - 1, np.pi)
    ub0, _ = bound(center0, h0)
    heap = [(-ub0, 0, center0, h0)]
    counter = 1
    for _ in range(budget):
        if not heap:
            return lo, lo, zbest
        negub, _, c, h = heapq.heappop(heap)
        up = np.sqrt(max(-negub, 0.0))
        if up - lo <= tol * max(1.0, lo):
            return lo, max(up, lo), zbest
        k = int(np.argmax(h))
        for s in (-1, 1):
            c2 = c.copy()
            h2 = h.copy()
            h2[k] = h[k] / 2
            c2[k] = c[k] + s * h2[k]
            ub, z = bound(c2, h2)
            if ub == -np.inf:
                continue
            v = score(z)
            if v > lo:
                lo, zbest = v, z
            if v > 0.99 * lo:
                za = ascend(z)
                v = score(za)
                if v > lo:
                    lo, zbest = v, za
            if np.sqrt(max(ub, 0.0)) > lo:
                heapq.heappush(heap, (-ub, counter, c2, h2))
                counter += 1
    if not heap:
        return lo, lo, zbest
    up = np.sqrt(max(-heap[0][0], 0.0))
    if up - lo <= tol * max(1.0, lo):
        return lo, max(up, lo), zbest
    raise NumericalFailure("phase branch-and-bound exhausted its budget",
                           lower=lo, upper=up, best=zbest)


def _poly_ball_to_l2(B, X, tol, budget):
    """Bracket ``max ||B x||_2`` over ``{x : max_k |X_k x| <= 1}``.

    The maximum of a convex function is attained at an extreme point, and
    the extreme points are ``X_S^{-1} z`` for invertible row subsets ``S``
    of size ``n`` and torus points ``z``. Each subset is searched with the
    remaining rows as constraints; the branch-and-bound budget is shared
    evenly. Returns ``(lower, upper, x_best)``.
    """
    k, n = X.shape
    subsets = [S for S in itertools.combinations(range(k), n)
               if np.linalg.cond(X[list(S)]) <= 1e12]
    share = max(1, budget // max(1, len(subsets)))
    lo, up, xbest = 0.0, 0.0, None
    for S in subsets:
        XSi = np.linalg.inv(X[list(S)])
        rest = [r for r in range(k) if r not in S]
        G = X[rest] @ XSi if rest else None
        try:
            lo_s, up_s, z = _polydisk_to_l2(B @ XSi, tol, share, G=G, lo=lo)
        except NumericalFailure as exc:
            lo_s, up_s, z = max(lo, exc.lower), exc.upper, exc.best
        if z is not None and lo_s > lo:
            xbest = XSi @ z
        lo, up = max(lo, lo_s), max(up, up_s)
    return lo, max(up, lo), xbest


def operator_norm(A, from_norm, to_norm, tol=DEFAULT_TOL, budget=20_000):
    """Operator norm of ``A`` from ``from_norm`` to ``to_norm``.

    Sup -> Sup is the exact maximal absolute row sum (``exact=True``). All
    other pairs return ``exact=False`` with a bracket ``[lower, upper]`` of
    width at most ``tol`` (relative above 1); otherwise
    :class:`NumericalFailure` carries the best bracket.

    Polyhedral-type sources into Euclidean-type targets run a phase
    branch-and-bound whose cost grows quickly with the source dimension;
    beyond three dimensions a tight ``tol`` may exhaust ``budget``.
    """
    A = as_matrix(A, (to_norm.dim, from_norm.dim))
    if isinstance(from_norm, Sup) and isinstance(to_norm, Sup):
        sums = np.abs(A).sum(axis=1)
        i = int(np.argmax(sums))
        x = np.exp(-1j * np.angle(A[i]))
        return OperatorNorm(float(sums[i]), x, True)

    form_to, Y = to_norm.reduced()
    form_from, X = from_norm.reduced()
    if form_to == "poly":
        # ||A x|| = max_k |<y_k A, x>|, so take the largest dual norm
        best = None
        lower = 0.0
        for yk in Y @ A:
            d = dual_norm_certificate(from_norm, yk, tol=tol * 0.5)
            lower = max(lower, d.lower)
            if best is None or d.upper > best.upper:
                best = d
        value = best.upper
        if value - lower > tol * max(1.0, value):
            raise NumericalFailure("dual-norm bracket too wide", lower=lower, upper=value)
        return OperatorNorm(value, best.witness, False, lower, value)

    B = Y @ A
    if form_from == "euclid":
        Xp = pseudo_inverse(X)
        U, s, Vh = np.linalg.svd(B @ Xp)
        x = Xp @ Vh[0].conj()
        nx = norm_eval(from_norm, x)
        x = x / nx if nx > 0 else x
        return OperatorNorm(float(s[0]), x, False, float(s[0]), float(s[0]))

    # poly source, euclidean target: search the extreme points of the ball
    lo, up, x = _poly_ball_to_l2(B, X, tol, budget)
    if x is None:
        x = pseudo_inverse(X) @ np.ones(X.shape[0])
    nx = norm_eval(from_norm, x)
    if nx > 0:
        x = x / nx
    if up - lo > tol * max(1.0, up):
        raise NumericalFailure("operator-norm bracket too wide", lower=lo, upper=up, best=x)
    return OperatorNorm(up, x, False, lo, up)


def unit_sphere_sample(N, count, seed):
    """Seeded list of vectors with ``norm_eval(N, x) == 1``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        x = rng.standard_normal(N.dim) + 1j * rng.standard_normal(N.dim)
        nx = norm_eval(N, x)
        if nx > 0:
            out.append(x / nx)
    return out


def ball_sample(N, count, seed, radius=0.9):
    """Seeded points with ``||x|| <= radius``; radii uniform in ``[0, radius)``."""
    rng = np.random.default_rng([seed, 1])
    pts = unit_sphere_sample(N, count, seed)
    return [p * radius * rng.random() for p in pts]
