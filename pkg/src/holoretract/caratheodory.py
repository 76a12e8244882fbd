"""Carathéodory infinitesimal metric on unit balls.

At the origin of the unit ball of any norm the Carathéodory and Kobayashi
metrics both equal the norm itself. Away from the origin the metric is
available on polydisks, by transporting the base point to 0 with a Möbius
automorphism. Isometry verdicts built on top of this are one-sided:
refutations come with exact witnesses, confirmations carry a tolerance.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionError, DomainError
from .holomap import evaluate, jacobian, moebius_inverse
from .linalg import as_matrix, as_vector
from .norms import Sup, norm_eval, norming_functional, unit_sphere_sample


def carath_origin(N, v):
    """``E_B(0, v)`` for the unit ball ``B`` of ``N``; this is ``||v||``."""
    v = as_vector(v)
    if v.shape[0] != N.dim:
        raise DimensionError(f"{N!r} expects vectors of length {N.dim}")
    return norm_eval(N, v)


kobayashi_origin = carath_origin


def functional_lower_bound(N, v, covectors=()):
    """``max |<g, v>|`` over dual-ball covectors.

    Linear forms of dual norm at most 1 map the ball into the unit disk, so
    each one bounds the Carathéodory metric from below. The norming
    functional of ``v`` is always included; ``covectors`` must already be
    normalized into the dual ball.
    """
    v = as_vector(v, N.dim)
    best = abs(norming_functional(N, v) @ v)
    for g in covectors:
        best = max(best, abs(np.asarray(g) @ v))
    return float(best)


def carath_supball(a, v):
    """``E_B(a, v)`` on the polydisk, i.e. ``max_i |v_i| / (1 - |a_i|^2)``.

    Computed by pushing ``(a, v)`` to the origin with the automorphism
    ``Moebius(-a)``.
    """
    a = as_vector(a)
    v = as_vector(v, a.shape[0])
    if np.max(np.abs(a)) >= 1:
        raise DomainError("base point must lie in the open polydisk")
    J = jacobian(moebius_inverse(a), a)
    return carath_origin(Sup(a.shape[0]), J @ v)


@dataclass
class IsometryVerdict:
    is_isometry: bool
    max_deviation: float
    witness: np.ndarray
    samples_used: int
    exact: bool = False  # True when the verdict came from the structural sup-norm test

    def to_dict(self):
        from .serialize import vector_to_json
        return {
            "is_isometry": bool(self.is_isometry),
            "max_deviation": float(self.max_deviation),
            "witness": vector_to_json(self.witness),
            "samples_used": int(self.samples_used),
            "exact": bool(self.exact),
        }


def sup_isometry_structure(A, tol=1e-9):
    """Exact test for ``A`` to be an isometry ``Sup(n) -> Sup(m)``.

    ``A`` is one iff every row has absolute sum at most 1 and every column
    has a unimodular entry. Returns ``(ok, deviation, witness)`` where the
    witness, when ``ok`` is False, is a unit vector with
    ``| ||A w|| - 1 | = deviation``.
    """
    A = as_matrix(A)
    m, n = A.shape
    sums = np.abs(A).sum(axis=1)
    i = int(np.argmax(sums))
    if sums[i] > 1 + tol:
        w = np.where(np.abs(A[i]) > 0, np.exp(-1j * np.angle(A[i])), 1.0)
        return False, float(sums[i] - 1), w.astype(complex)
    colmax = np.abs(A).max(axis=0) if m else np.zeros(n)
    k = int(np.argmin(colmax))
    if colmax[k] < 1 - tol:
        w = np.zeros(n, dtype=complex)
        w[k] = 1
        return False, float(1 - colmax[k]), w
    dev = max(float(sums[i] - 1), float(1 - colmax[k]), 0.0)
    return True, dev, np.zeros(n, dtype=complex)


def _refine_deviation(A, from_norm, to_norm, x0, maxiter):
    n = x0.shape[0]

    def neg_dev(p):
        x = p[:n] + 1j * p[n:]
        nx = norm_eval(from_norm, x)
        if nx == 0:
            return 0.0
        return -abs(norm_eval(to_norm, A @ x) / nx - 1)

    res = minimize(neg_dev, np.concatenate([x0.real, x0.imag]), method="Nelder-Mead",
                   options={"maxiter": maxiter, "xatol": 1e-12, "fatol": 1e-14})
    x = res.x[:n] + 1j * res.x[n:]
    nx = norm_eval(from_norm, x)
    if nx == 0:
        return 0.0, x0
    x = x / nx
    return abs(norm_eval(to_norm, A @ x) - 1), x


def isometry_check(A, from_norm, to_norm, samples=2000, seed=0, tol=1e-6, refine=5):
    """Sampled (plus locally refined) test of ``||A x||_to == ||x||_from``.

    For sup-normed source and target the exact structural test decides and
    the sample sweep only confirms it.
    """
    A = as_matrix(A, (to_norm.dim, from_norm.dim))
    xs = np.array(unit_sphere_sample(from_norm, samples, seed))
    devs = np.abs(norm_eval(to_norm, xs @ A.T) - 1)
    order = np.argsort(devs)[::-1]
    best_dev, best_x = float(devs[order[0]]), xs[order[0]]

    if isinstance(from_norm, Sup) and isinstance(to_norm, Sup):
        ok, dev, w = sup_isometry_structure(A, tol=min(tol, 1e-9))
        if not ok:
            if best_dev > dev:
                dev, w = best_dev, best_x
            return IsometryVerdict(False, dev, w, samples, exact=True)
        return IsometryVerdict(best_dev <= tol, best_dev, best_x, samples, exact=True)

    for idx in order[:refine]:
        dev, x = _refine_deviation(A, from_norm, to_norm, xs[idx], maxiter=400 * from_norm.dim)
        if dev > best_dev:
            best_dev, best_x = dev, x
    return IsometryVerdict(best_dev <= tol, best_dev, best_x, samples)


@dataclass
class SchwarzPickReport:
    max_violation: float
    max_equality_gap: float
    origin_violation: float
    points_checked: int
    samples: int

    def to_dict(self):
        return {k: (float(v) if isinstance(v, float) else v) for k, v in self.__dict__.items()}


def schwarz_pick_check(f, from_norm, to_norm, samples=200, seed=0, radius=0.9):
    """Check that ``f`` does not expand the Carathéodory metric.

    At the origin: ``E_{B2}(f(0), f'(0) v) <= ||v||_1``; when ``f(0) != 0`` the
    target must be a polydisk. When both norms are sup norms the comparison
    is repeated at sampled interior base points. ``max_equality_gap``
    records how far ``f`` is from being an infinitesimal isometry.
    """
    from .norms import ball_sample

    pts = np.array(ball_sample(from_norm, samples, seed, radius))
    images = evaluate(f, pts)
    if np.any(norm_eval(to_norm, images) >= 1):
        raise DomainError("f maps sampled points outside the target ball")

    vs = unit_sphere_sample(from_norm, samples, seed + 1)
    f0 = evaluate(f, np.zeros(from_norm.dim))
    J0 = jacobian(f, np.zeros(from_norm.dim))
    sup_target = isinstance(to_norm, Sup)
    if np.max(np.abs(f0)) > 1e-12 and not sup_target:
        raise DomainError("f(0) != 0 and the target metric is only known at the origin")

    def target_metric(base, w):
        return carath_supball(base, w) if sup_target else carath_origin(to_norm, w)

    viol, gap = 0.0, 0.0
    for v in vs:
        d = target_metric(f0, J0 @ v) - 1.0
        viol, gap = max(viol, d), max(gap, abs(d))
    origin_violation = max(viol, 0.0)
    checked = 1
    if isinstance(from_norm, Sup) and sup_target:
        for x, fx, v in zip(pts, images, vs):
            lhs = carath_supball(fx, jacobian(f, x) @ v)
            rhs = carath_supball(x, v)
            d = (lhs - rhs) / rhs
            viol, gap = max(viol, d), max(gap, abs(d))
            checked += 1
    return SchwarzPickReport(max(viol, 0.0), gap, origin_violation, checked, samples)
