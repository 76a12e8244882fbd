"""Holomorphic retractions onto isometric images of balls.

Given ``f: B1 -> B2`` with ``f(0) = 0``, ``f'(0)`` an isometry and a norm-one
projection ``pi`` onto ``f'(0)(E1)``, the map ``phi = pi o f`` is the linear
isometry ``f'(0)``, the image ``f(B1)`` is the graph of

    psi(y) = (id - pi) f(phi^{-1} y)

over ``phi(B1)``, ``r(y) = pi y + psi(pi y)`` retracts ``B2`` onto ``f(B1)`` and
``g = phi^{-1} o pi`` inverts ``f`` on its image. Linearity of ``pi o f`` is
checked through its Taylor coefficients rather than assumed.
"""

from dataclasses import dataclass, field

import numpy as np

from .caratheodory import carath_supball, isometry_check
from .errors import (DomainError, Infeasible, LinearityViolation, NotAnIsometry,
                     NumericalFailure, VerificationFailure)
from .holomap import (Compose, Linear, Sum, evaluate, jacobian, moebius_automorphism,
                      moebius_inverse, taylor_coefficients)
from .linalg import as_matrix, as_vector, pseudo_inverse, rank
from .norms import Euclidean, Sup, ball_sample, norm_eval, operator_norm, unit_sphere_sample
from .projections import (NormCertificate, ProjectionBundle, _bundle, min_projection_norm,
                          project_hilbert, property_v_c0, property_v_supsource)
from .serialize import map_to_json, matrix_to_json

RESIDUAL_TOL = 1e-8
CARTAN_TOL = 1e-8


class NoNormOneProjection(Infeasible):
    """The minimal projection norm onto the subspace is certified above 1."""


@dataclass
class LinearityReport:
    passed: bool
    max_modulus: float
    worst_multi_index: tuple
    coefficients_checked: int
    max_order: int
    radius: float

    def to_dict(self):
        return {"passed": bool(self.passed), "max_modulus": float(self.max_modulus),
                "worst_multi_index": list(self.worst_multi_index or ()),
                "coefficients_checked": self.coefficients_checked,
                "max_order": self.max_order, "radius": self.radius}


def verify_linearity_of_pi_f(f, pi, max_order=4, radius=0.5, tol=CARTAN_TOL):
    """Check that ``pi o f`` has no Taylor terms of order ``2..max_order``."""
    pi = as_matrix(pi, (f.dim_out, f.dim_out))
    if np.abs(evaluate(f, np.zeros(f.dim_in))).max() > 1e-12:
        raise DomainError("f(0) must vanish")
    if np.abs(pi @ pi - pi).max() > 1e-9:
        raise ValueError("pi is not idempotent")
    coeffs = taylor_coefficients(Compose((Linear(pi), f)), max_order, radius, min_order=2)
    worst, worst_alpha = 0.0, None
    for alpha, c in coeffs.items():
        mod = float(np.abs(c).max())
        if mod > worst or worst_alpha is None:
            worst, worst_alpha = mod, alpha
    return LinearityReport(worst <= tol, worst, worst_alpha, len(coeffs), max_order, radius)


@dataclass
class RetractionBundle:
    f: object
    pi: ProjectionBundle
    phi: np.ndarray
    psi: object
    r: object
    g: object
    verification: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "f": map_to_json(self.f),
            "pi": self.pi.to_dict(),
            "phi": matrix_to_json(self.phi),
            "psi": map_to_json(self.psi),
            "r": map_to_json(self.r),
            "g": map_to_json(self.g),
            "verification": self.verification,
        }


def _max_norm(N, arr):
    return float(np.max(norm_eval(N, arr))) if len(arr) else 0.0


def build_retraction(f, n1, n2, pi, samples=200, seed=0, max_order=4, radius=0.5,
                     tol=RESIDUAL_TOL, isometry_tol=1e-6):
    """Construct and verify ``(phi, psi, r, g)`` for ``f`` and projection ``pi``.

    Raises :class:`LinearityViolation` when ``pi o f`` is not linear (so the
    hypotheses cannot hold) and :class:`VerificationFailure` when any sampled
    residual exceeds ``tol`` or the projection norm exceeds 1.
    """
    n, m = n1.dim, n2.dim
    if (f.dim_in, f.dim_out) != (n, m):
        raise ValueError("map dimensions do not match the norms")
    if np.abs(evaluate(f, np.zeros(n))).max() > 1e-12:
        raise DomainError("f(0) != 0; move the base point with conjugate_to_origin first")
    J = jacobian(f, np.zeros(n))
    verdict = isometry_check(J, n1, n2, samples=max(samples, 500), seed=seed, tol=isometry_tol)
    if not verdict.is_isometry:
        raise NotAnIsometry(f"f'(0) is not an isometry (deviation {verdict.max_deviation:.3e})",
                            witness=verdict.witness)
    P = pi.pi
    range_residual = float(np.abs(P @ J - J).max())
    if range_residual > 1e-9 or rank(P) != rank(J):
        raise VerificationFailure("projection range is not f'(0)(E1)",
                                  {"range_residual": range_residual})

    linearity = verify_linearity_of_pi_f(f, P, max_order, radius)
    if not linearity.passed:
        raise LinearityViolation(
            f"pi o f has a coefficient of modulus {linearity.max_modulus:.3e} "
            f"at multi-index {linearity.worst_multi_index}",
            multi_index=linearity.worst_multi_index, modulus=linearity.max_modulus)
    if pi.norm_certificate.upper > 1 + 1e-6:
        raise VerificationFailure("projection norm certificate exceeds 1",
                                  {"norm_certificate": pi.norm_certificate.upper})

    phi = P @ J
    phi_inv = pseudo_inverse(phi)
    psi = Compose((Linear(np.eye(m) - P), f, Linear(phi_inv)))
    r = Sum((Linear(P), Compose((psi, Linear(P)))))
    g = Compose((Linear(phi_inv), Linear(P)))

    xs = np.array(ball_sample(n1, samples, seed))
    ys = np.array(ball_sample(n2, samples, seed + 1))
    fx = evaluate(f, xs)
    ry = evaluate(r, ys)
    phix = xs @ phi.T
    Jr = jacobian(r, np.zeros(m))
    rev = operator_norm(Jr, n2, n2)
    residuals = {
        "phi_vs_jacobian": float(np.abs(phi - J).max()),
        "r_idempotent": _max_norm(n2, evaluate(r, ry) - ry),
        "r_fixes_image": _max_norm(n2, evaluate(r, fx) - fx),
        "g_inverts_f": _max_norm(n1, evaluate(g, fx) - xs),
        "graph": _max_norm(n2, fx - (phix + evaluate(psi, phix))),
        "r_lands_on_image": _max_norm(n2, ry - evaluate(f, evaluate(g, ry))),
        "reverse_jacobian_vs_pi": float(np.abs(Jr - P).max()),
        "reverse_norm_minus_one": abs(rev.value - 1.0),
    }
    max_norm_r = _max_norm(n2, ry)
    verification = {
        "residuals": residuals,
        "max_norm_r_on_samples": max_norm_r,
        "reverse_norm": {"value": rev.value, "exact": bool(rev.exact),
                         "lower": rev.lower, "upper": rev.upper},
        "linearity": linearity.to_dict(),
        "isometry": verdict.to_dict(),
        "samples": samples,
        "seed": seed,
        "tol": tol,
    }
    bad = {k: v for k, v in residuals.items() if v > tol}
    if max_norm_r >= 1:
        bad["max_norm_r_on_samples"] = max_norm_r
    if bad:
        raise VerificationFailure(f"residuals above tolerance: {sorted(bad)}", residuals)
    return RetractionBundle(f, pi, phi, psi, r, g, verification)


def conjugate_to_origin(f, a):
    """``Moebius(-f(a)) o f o Moebius(a)``, which fixes the origin.

    Both balls must be polydisks, where the Möbius maps are automorphisms.
    """
    a = as_vector(a, f.dim_in)
    if np.max(np.abs(a)) >= 1:
        raise DomainError("base point outside the source polydisk")
    b = evaluate(f, a)
    if np.max(np.abs(b)) >= 1:
        raise DomainError("f(a) outside the target polydisk")
    return Compose((moebius_inverse(b), f, moebius_automorphism(a)))


def conjugation_report(f, a, samples=200, seed=0):
    """Compare ``f'(a)`` at ``a`` with the derivative of the conjugated map at 0.

    For ``w = Moebius(a)'(0) v`` the chain rule and automorphism invariance
    give ``||f~'(0) v|| = E(f(a), f'(a) w)`` and ``E(a, w) = ||v||``.
    """
    a = as_vector(a, f.dim_in)
    ft = conjugate_to_origin(f, a)
    J0 = jacobian(ft, np.zeros(f.dim_in))
    Ja = jacobian(f, a)
    Ma = jacobian(moebius_automorphism(a), np.zeros(f.dim_in))
    b = evaluate(f, a)
    vs = unit_sphere_sample(Sup(f.dim_in), samples, seed)
    chain, isom = 0.0, 0.0
    for v in vs:
        w = Ma @ v
        lhs = norm_eval(Sup(f.dim_out), J0 @ v)
        rhs = carath_supball(b, Ja @ w)
        chain = max(chain, abs(lhs - rhs))
        isom = max(isom, abs(rhs - carath_supball(a, w)))
    return {"f_tilde_at_0": float(np.abs(evaluate(ft, np.zeros(f.dim_in))).max()),
            "chain_rule_deviation": chain, "carath_isometry_deviation_at_a": isom}


def choose_projection(L, n1, n2, tol=1e-6):
    """Pick the norm-one projection construction that applies to ``(n1, n2)``."""
    L = as_matrix(L, (n2.dim, n1.dim))
    if isinstance(n2, Euclidean):
        return project_hilbert(L, n2)
    if isinstance(n1, Sup) and isinstance(n2, Sup):
        return property_v_c0(L)
    if isinstance(n1, Sup):
        return property_v_supsource(L, n2, tol=tol)
    mp = min_projection_norm(list(L.T), n2, tol=tol)
    if mp.lower > 1 + tol:
        raise NoNormOneProjection(f"minimal projection norm is {mp.value:.6f} > 1",
                                  lower=mp.lower, upper=mp.upper)
    if mp.upper > 1 + tol:
        raise NumericalFailure("minimal projection norm bracket straddles 1",
                               lower=mp.lower, upper=mp.upper)
    H = pseudo_inverse(L) @ mp.pi
    cert = NormCertificate(mp.upper, False, mp.lower, mp.upper, "min_projection_lp")
    return _bundle(L, H, cert, "min_projection")


def retract_at_point(f, a, samples=200, seed=0, max_order=4, radius=0.5, tol=RESIDUAL_TOL):
    """Full pipeline for maps between polydisks with an isometric derivative at ``a``.

    Conjugates ``f`` to the origin, builds the projection and retraction
    there, and transports the retraction back: ``R = Moebius(b) o r o
    Moebius(-b)`` with ``b = f(a)`` retracts onto ``f(B1)``.
    """
    n, m = f.dim_in, f.dim_out
    n1, n2 = Sup(n), Sup(m)
    a = as_vector(a, n)
    b = evaluate(f, a)
    ft = conjugate_to_origin(f, a)
    conj = conjugation_report(f, a, samples, seed)
    J = jacobian(ft, np.zeros(n))
    pi = choose_projection(J, n1, n2)
    bundle = build_retraction(ft, n1, n2, pi, samples, seed, max_order, radius, tol)
    R = Compose((moebius_automorphism(b), bundle.r, moebius_inverse(b)))
    G = Compose((moebius_automorphism(a), bundle.g, moebius_inverse(b)))

    xs = np.array(ball_sample(n1, samples, seed + 2))
    ys = np.array(ball_sample(n2, samples, seed + 3))
    fx = evaluate(f, xs)
    Ry = evaluate(R, ys)
    original = {
        "R_idempotent": _max_norm(n2, evaluate(R, Ry) - Ry),
        "R_fixes_image": _max_norm(n2, evaluate(R, fx) - fx),
        "G_inverts_f": _max_norm(n1, evaluate(G, fx) - xs),
        "f_at_a_equals_b": float(np.abs(evaluate(f, a) - b).max()),
    }
    bad = {k: v for k, v in original.items() if v > tol}
    for k in ("chain_rule_deviation", "carath_isometry_deviation_at_a"):
        if conj[k] > 1e-9:
            bad[k] = conj[k]
    if bad:
        raise VerificationFailure(f"transported residuals above tolerance: {sorted(bad)}",
                                  {**original, **conj})
    return {
        "bundle": bundle,
        "conjugated": ft,
        "R": R,
        "G": G,
        "b": b,
        "conjugation": conj,
        "original_residuals": original,
    }
