"""Norm-one projections onto isometric images.

Three constructions are provided:

* :func:`project_hilbert`: orthogonal projection, for Euclidean targets;
* :func:`property_v_supsource`: for a sup-normed source, extend each
  coordinate of the inverse map to the whole target with minimal dual norm
  and assemble ``pi = L H``;
* :func:`property_v_c0`: for sup-to-sup isometries, read off the support
  indices of the columns and project through them.

:func:`min_projection_norm` computes the smallest operator norm over all
projections onto a subspace, and :func:`counterexample_obstruction` replays
the argument that the 2-dimensional subspace ``{(x, y, x + y)}`` of the
3-dimensional polydisk space admits no norm-one projection.
"""

from dataclasses import dataclass, field

import numpy as np

from .convex import solve_modulus_lp, complex_l1_min
from .errors import (Infeasible, NotAnIsometry, NumericalFailure,
                     VanishingViolation, WrongNormKind)
from .linalg import as_matrix, as_vector, kernel_basis, pseudo_inverse, rank
from .norms import DEFAULT_TOL, Euclidean, Sup, norm_eval, operator_norm
from .serialize import matrix_to_json, norm_to_json, vector_to_json

UNIMODULAR_TOL = 1e-12
VANISHING_TOL = 1e-10


@dataclass
class NormCertificate:
    value: float
    exact: bool
    lower: float = None
    upper: float = None
    method: str = ""

    def __post_init__(self):
        if self.lower is None:
            self.lower = self.value
        if self.upper is None:
            self.upper = self.value

    def to_dict(self):
        return {"value": float(self.value), "exact": bool(self.exact), "lower": float(self.lower),
                "upper": float(self.upper), "method": self.method}


@dataclass
class ProjectionBundle:
    pi: np.ndarray
    range_basis: list
    complement_basis: list
    H: np.ndarray
    norm_certificate: NormCertificate
    method: str = ""
    details: dict = field(default_factory=dict)

    def residuals(self, L=None):
        """Invariant residuals; ``L`` defaults to the stacked range basis."""
        pi = self.pi
        m = pi.shape[0]
        R = np.column_stack(self.range_basis) if self.range_basis else np.zeros((m, 0))
        L = R if L is None else as_matrix(L)
        C = np.column_stack(self.complement_basis) if self.complement_basis else np.zeros((m, 0))
        return {
            "idempotence": float(np.abs(pi @ pi - pi).max()),
            "range_fixing": float(np.abs(pi @ L - L).max()) if L.size else 0.0,
            "complement_annihilated": float(np.abs(pi @ C).max()) if C.size else 0.0,
            "left_inverse": float(np.abs(self.H @ L - np.eye(L.shape[1])).max()) if L.size else 0.0,
            "direct_sum_rank_deficit": int(m - rank(np.hstack([R, C]))),
            "range_rank_deficit": int(rank(L) - rank(pi)) if L.size else 0,
        }

    def check(self, L=None, tol=1e-9, norm_tol=1e-6):
        res = self.residuals(L)
        ok = (res["idempotence"] <= tol and res["range_fixing"] <= tol
              and res["complement_annihilated"] <= tol and res["direct_sum_rank_deficit"] == 0
              and res["range_rank_deficit"] == 0
              and self.norm_certificate.upper <= 1 + norm_tol)
        return ok, res

    def to_dict(self, L=None):
        return {
            "method": self.method,
            "pi": matrix_to_json(self.pi),
            "H": matrix_to_json(self.H),
            "range_basis": [vector_to_json(v) for v in self.range_basis],
            "complement_basis": [vector_to_json(v) for v in self.complement_basis],
            "norm_certificate": self.norm_certificate.to_dict(),
            "residuals": self.residuals(L),
            "details": self.details,
        }


def _bundle(L, H, certificate, method, details=None):
    pi = L @ H
    return ProjectionBundle(pi=pi, range_basis=[c.copy() for c in L.T],
                            complement_basis=kernel_basis(pi), H=H,
                            norm_certificate=certificate, method=method,
                            details=details or {})


def _certify(pi, n2, tol, fallback=None):
    try:
        on = operator_norm(pi, n2, n2, tol=tol)
        return NormCertificate(on.value, on.exact, on.lower, on.upper, "operator_norm")
    except NumericalFailure as exc:
        if fallback is None:
            raise
        return NormCertificate(fallback, False, exc.lower, fallback, "extension_bound")


def project_hilbert(L, n2):
    """Orthogonal projection onto ``range(L)`` in a Euclidean target."""
    if not isinstance(n2, Euclidean):
        raise WrongNormKind(f"project_hilbert needs a Euclidean target, got {n2!r}")
    L = as_matrix(L, (n2.dim, None))
    Lh = L.conj().T
    H = np.linalg.solve(Lh @ L, Lh)
    pi = L @ H
    s = np.linalg.svd(pi, compute_uv=False)
    cert = NormCertificate(float(s[0]), False, float(s[0]), float(s[0]), "spectral")
    return _bundle(L, H, cert, "hilbert")


@dataclass
class Extension:
    h: np.ndarray
    dual_norm: float
    lower: float
    upper: float

    def __iter__(self):
        return iter((self.h, self.dual_norm))


def min_norm_extension(S_basis, values, n2, tol=DEFAULT_TOL, budget=500):
    """Extend the functional ``s_i -> values[i]`` to the whole space.

    Returns the extension ``h`` (with ``<h, s_i> = values[i]``) of smallest
    dual norm, together with a bracket on that minimal dual norm.
    """
    S = np.column_stack([as_vector(s, n2.dim) for s in S_basis])
    v = as_vector(values, S.shape[1])
    if rank(S) < S.shape[1]:
        raise ValueError("subspace basis is linearly dependent")
    form, X = n2.reduced()
    if form == "euclid":
        w = pseudo_inverse(S.T @ X.T) @ v
        h = X.T @ w
        val = float(np.linalg.norm(w))
        return Extension(h, val, val, val)
    c, sol = complex_l1_min(S.T @ X.T, v, tol=tol, budget=budget)
    h = X.T @ c
    return Extension(h, sol.upper, sol.lower, sol.upper)


def property_v_supsource(L, n2, tol=DEFAULT_TOL):
    """Norm-one projection onto ``L(C^n)`` for a sup-normed source.

    The inverse of ``L`` on its range has coordinate functionals
    ``G_i`` (``G_i(L e_k) = delta_ik``). Each is extended to the whole target
    with minimal dual norm; the extensions ``H_i`` stack into ``H`` and
    ``pi = L H``. Since ``||H|| = max_i ||H_i||`` into a sup-normed space, the
    projection has norm one as soon as every extension does.
    """
    L = as_matrix(L, (n2.dim, None))
    n = L.shape[1]
    if rank(L) < n:
        raise NotAnIsometry("L is not injective")
    exts = [min_norm_extension(list(L.T), np.eye(n)[i], n2, tol=tol * 0.1) for i in range(n)]
    norms = [e.upper for e in exts]
    if max(norms) > 1 + tol:
        raise Infeasible("coordinate functionals admit no norm-one extension",
                         extension_norms=norms, lower=max(e.lower for e in exts),
                         upper=max(norms))
    H = np.array([e.h for e in exts])
    # small correction so that H L = I holds to rounding
    H = H + (np.eye(n) - H @ L) @ pseudo_inverse(L)
    cert = _certify(L @ H, n2, tol, fallback=max(norms))
    details = {"extension_norms": norms, "extension_lower_bounds": [e.lower for e in exts]}
    return _bundle(L, H, cert, "supsource", details)


@dataclass
class SupportIndexCertificate:
    j_of_k: list
    lambda_k: np.ndarray
    M: list
    phi: np.ndarray
    vanishing_checks: list

    def to_dict(self):
        return {
            "j_of_k": list(self.j_of_k),
            "lambda_k": vector_to_json(self.lambda_k),
            "M": list(self.M),
            "phi": matrix_to_json(self.phi),
            "vanishing_checks": [list(c) for c in self.vanishing_checks],
        }


def support_index_certificate(L, m=None, n=None):
    """Support indices of a sup-to-sup isometry (0-based).

    For each column ``k`` the smallest row ``j(k)`` with ``|L[j(k), k]| = 1``
    is chosen; every other entry of that row must vanish, which makes
    ``k -> j(k)`` injective. ``vanishing_checks`` lists
    ``(k, j(k), l, |L[j(k), l]|)`` for every ``l != k``.
    """
    L = as_matrix(L, (m, n))
    m, n = L.shape
    j_of_k, lam, checks = [], [], []
    for k in range(n):
        hits = np.flatnonzero(np.abs(np.abs(L[:, k]) - 1) <= UNIMODULAR_TOL)
        if hits.size == 0:
            w = np.zeros(n, dtype=complex)
            w[k] = 1
            raise NotAnIsometry(f"column {k} has no unimodular entry", witness=w)
        j = int(hits[0])
        for l in range(n):
            if l == k:
                continue
            val = abs(L[j, l])
            checks.append((k, j, l, float(val)))
            if val > VANISHING_TOL:
                w = np.zeros(n, dtype=complex)
                w[k] = 1
                w[l] = np.exp(1j * (np.angle(L[j, k]) - np.angle(L[j, l])))
                raise VanishingViolation(
                    f"L[{j}, {l}] = {L[j, l]} should vanish (row j({k}) = {j})", k, l, witness=w)
        j_of_k.append(j)
        lam.append(L[j, k])
    if len(set(j_of_k)) != n:
        raise NotAnIsometry("support indices are not injective")
    M = sorted(j_of_k)
    phi = L[M, :]
    return SupportIndexCertificate(j_of_k, np.array(lam, dtype=complex), M, phi, checks)


def property_v_c0(L, cert=None):
    """Norm-one projection ``L phi^{-1} pi_M`` built from support indices."""
    L = as_matrix(L)
    if cert is None:
        cert = support_index_certificate(L)
    m, n = L.shape
    S = np.zeros((len(cert.M), m), dtype=complex)
    S[np.arange(len(cert.M)), cert.M] = 1
    # phi is a permutation times a unimodular diagonal; its inverse is exact
    phi_inv = np.linalg.inv(cert.phi)
    H = phi_inv @ S
    pi = L @ H
    sums = np.abs(pi).sum(axis=1)
    cert_norm = NormCertificate(float(sums.max()), True, method="row_sum")
    return _bundle(L, H, cert_norm, "c0", {"support": cert.to_dict()})


@dataclass
class MinProjection:
    value: float
    pi: np.ndarray
    lower: float
    upper: float
    certified: bool
    iterations: int = 0

    def __iter__(self):
        return iter((self.value, self.pi))

    def to_dict(self):
        return {"value": float(self.value), "lower": float(self.lower), "upper": float(self.upper),
                "certified": bool(self.certified), "iterations": int(self.iterations),
                "pi": matrix_to_json(self.pi)}


def _min_projection_lp(B, F, tol, budget):
    """Minimize ``max_k dual(f_k P)`` over projections ``P = B H``, ``H B = I``.

    The dual norm of a row ``w`` is ``min sum_l |c_l|`` over ``F^T c = w``, so
    the whole problem is one modulus-cone LP in ``(H, c, t, s)``.
    """
    m, r = B.shape
    K = F.shape[0]
    nH = r * m
    off_c = 2 * nH
    off_t = off_c + 2 * K * K
    i_s = off_t + K * K
    nvar = i_s + 1

    def iH(s, j):
        return s * m + j, nH + s * m + j

    def ic(k, l):
        return off_c + k * K + l, off_c + K * K + k * K + l

    def add(re_row, im_row, alpha, idx):
        a, b = idx
        re_row[a] += alpha.real
        re_row[b] -= alpha.imag
        im_row[a] += alpha.imag
        im_row[b] += alpha.real

    eq_rows, eq_rhs = [], []
    # H B = I
    for s in range(r):
        for q in range(r):
            re_row, im_row = np.zeros(nvar), np.zeros(nvar)
            for j in range(m):
                add(re_row, im_row, B[j, q], iH(s, j))
            eq_rows += [re_row, im_row]
            eq_rhs += [float(s == q), 0.0]
    # F^T c_k = H^T B^T f_k
    BtF = B.T @ F.T  # (r, K): column k is B^T f_k
    for k in range(K):
        for j in range(m):
            re_row, im_row = np.zeros(nvar), np.zeros(nvar)
            for l in range(K):
                add(re_row, im_row, F[l, j], ic(k, l))
            for s in range(r):
                add(re_row, im_row, -BtF[s, k], iH(s, j))
            eq_rows += [re_row, im_row]
            eq_rhs += [0.0, 0.0]
    a_eq = np.array(eq_rows)
    b_eq = np.array(eq_rhs)

    cone_re = np.zeros((K * K, nvar))
    cone_im = np.zeros((K * K, nvar))
    cone_t = np.zeros(K * K, dtype=int)
    a_ub = np.zeros((K, nvar))
    for k in range(K):
        for l in range(K):
            p = k * K + l
            a, b = ic(k, l)
            cone_re[p, a] = 1
            cone_im[p, b] = 1
            cone_t[p] = off_t + p
            a_ub[k, off_t + p] = 1
        a_ub[k, i_s] = -1
    cost = np.zeros(nvar)
    cost[i_s] = 1

    def unpack(z):
        H = (z[:nH] + 1j * z[nH:2 * nH]).reshape(r, m)
        c = (z[off_c:off_c + K * K] + 1j * z[off_c + K * K:off_t]).reshape(K, K)
        return H, c

    def objective(z):
        _, c = unpack(z)
        return np.abs(c).sum(axis=1).max()

    sol = solve_modulus_lp(cost, cone_re, cone_im, cone_t, objective, a_eq=a_eq, b_eq=b_eq,
                           a_ub=a_ub, b_ub=np.zeros(K), tol=tol, budget=budget)
    H, _ = unpack(sol.z)
    return H, sol


def min_projection_norm(range_basis, n2, tol=DEFAULT_TOL, budget=2000):
    """Smallest operator norm of a projection onto ``span(range_basis)``.

    Polyhedral-type targets (sup, polyhedral, pullbacks of these) are solved
    as one certified cutting-plane LP; Euclidean-type targets always admit
    the orthogonal projection (for the pulled-back inner product), of norm 1.
    """
    B = np.column_stack([as_vector(v, n2.dim) for v in range_basis])
    if rank(B) < B.shape[1]:
        raise ValueError("range basis is linearly dependent")
    form, X = n2.reduced()
    if form == "euclid":
        G = X.conj().T @ X
        Bh = B.conj().T
        pi = B @ np.linalg.solve(Bh @ G @ B, Bh @ G)
        on = operator_norm(pi, n2, n2)
        return MinProjection(on.value, pi, 1.0, on.upper, True)
    try:
        H, sol = _min_projection_lp(B, X, tol, budget)
    except NumericalFailure as exc:
        best = exc.best
        raise NumericalFailure(str(exc), lower=exc.lower, upper=exc.upper,
                               best=None if best is None else best.z) from exc
    pi = B @ H
    upper = sol.upper
    if isinstance(n2, Sup):
        upper = min(upper, float(np.abs(pi).sum(axis=1).max()))
    return MinProjection(upper, pi, sol.lower, upper, True, sol.iterations)


# --- the finite-dimensional counterexample ------------------------------------

def _face_forces_zero(L, p, direction, samples, rng):
    """Replay the face argument for the point ``p = L u`` of norm one.

    ``p + t e`` stays on the unit sphere for ``|t| <= 1``. A norm-one
    projection fixing ``p`` sends it to ``p + t pi(e)``, so every coordinate
    where ``|p_j| = 1`` must vanish in ``pi(e)``; otherwise a ``t`` along the
    phase of ``p_j / pi(e)_j`` exceeds norm one. Returns the face check, the
    perturbation witnesses for random candidates, and the subspace of
    ``range(L)`` compatible with the forced zeros.
    """
    m = L.shape[0]
    e = np.zeros(m, dtype=complex)
    e[direction] = 1
    ts = np.concatenate([np.exp(2j * np.pi * rng.random(samples)) * rng.random(samples) ** 0.5,
                         np.exp(2j * np.pi * np.arange(8) / 8)])
    face_dev = float(np.max(np.abs(norm_eval(Sup(m), p[None, :] + ts[:, None] * e[None, :]) - 1)))
    active = [j for j in range(m) if abs(abs(p[j]) - 1) <= 1e-12]

    violations = []
    for _ in range(samples):
        w = L @ (rng.standard_normal(L.shape[1]) + 1j * rng.standard_normal(L.shape[1]))
        j = max(active, key=lambda jj: abs(w[jj]))
        eps = 0.5 / max(1.0, np.abs(w).max())
        t = eps * np.exp(1j * (np.angle(p[j]) - np.angle(w[j])))
        violations.append(float(norm_eval(Sup(m), p + t * w)))
    kernel = kernel_basis(L[active, :])
    return {
        "point": vector_to_json(p),
        "direction": int(direction),
        "face_deviation": face_dev,
        "active_coordinates": active,
        "min_perturbed_norm": min(violations),
        "forced_image_dimension": len(kernel),
    }


def counterexample_obstruction(seed=0, samples=64, tol=DEFAULT_TOL):
    """Machine-checked proof that ``{(x, y, x + y)}`` has no norm-one projection in ``Sup(3)``.

    Steps: (a) the segments ``(1,0,1) + t e_2`` and ``(0,1,1) + t e_1`` lie on
    the unit sphere; (b) a norm-one projection would therefore kill ``e_2``
    and ``e_1``; (c) linearity then gives ``pi(1,0,1) = (1,1,2)``, although
    ``(1,0,1)`` is in the range. The minimal projection norm, computed by
    the certified LP, quantifies the failure.
    """
    from .fixtures import COUNTEREXAMPLE_L as L

    rng = np.random.default_rng(seed)
    p = L @ np.array([1, 0])
    q = L @ np.array([0, 1])
    step_p = _face_forces_zero(L, p, 1, samples, rng)
    step_q = _face_forces_zero(L, q, 0, samples, rng)

    e = np.eye(3, dtype=complex)
    pi_e1 = np.zeros(3, dtype=complex)
    pi_e2 = np.zeros(3, dtype=complex)
    L11 = L @ np.array([1, 1])
    # e3 = L(1,1) - e1 - e2 and pi fixes L(1,1)
    pi_e3 = L11 - pi_e1 - pi_e2
    pi_p = pi_e1 + pi_e3
    contradiction = bool(np.abs(pi_p - p).max() > 0.5)

    mp = min_projection_norm(list(L.T), Sup(3), tol=tol)
    # the optimal projection, too, is pushed off the unit ball along the face
    w = mp.pi @ e[1]
    j = int(np.argmax(np.abs(w[[0, 2]])))
    j = [0, 2][j]
    t = np.exp(1j * (np.angle(p[j]) - np.angle(w[j]))) if abs(w[j]) > 0 else 1.0
    y = p + t * e[1]
    return {
        "L": matrix_to_json(L),
        "L_of_1_1": vector_to_json(L11),
        "step_a_face_deviation": max(step_p["face_deviation"], step_q["face_deviation"]),
        "step_b": [step_p, step_q],
        "step_b_pi_e2_forced_zero": step_p["forced_image_dimension"] == 0
        and step_p["min_perturbed_norm"] > 1,
        "step_b_pi_e1_forced_zero": step_q["forced_image_dimension"] == 0
        and step_q["min_perturbed_norm"] > 1,
        "step_c_pi_e3": vector_to_json(pi_e3),
        "step_c_pi_of_1_0_1": vector_to_json(pi_p),
        "step_c_required": vector_to_json(p),
        "step_c_contradiction": contradiction,
        "optimal_projection": mp.to_dict(),
        "optimal_projection_face_witness": {
            "y": vector_to_json(y),
            "norm_y": float(norm_eval(Sup(3), y)),
            "norm_pi_y": float(norm_eval(Sup(3), mp.pi @ y)),
        },
        "no_norm_one_projection": bool(contradiction and mp.lower > 1 + tol),
    }


def projection_problem_to_json(L, source_norm, target_norm):
    return {"L": matrix_to_json(L), "source_norm": norm_to_json(source_norm),
            "target_norm": norm_to_json(target_norm)}
