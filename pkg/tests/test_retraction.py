import numpy as np
import pytest

from holoretract.errors import LinearityViolation, NotAnIsometry, VerificationFailure
from holoretract.fixtures import (OFFCENTER_A, bidisk_embedding, offcenter_map, parabola_map)
from holoretract.holomap import Compose, Identity, Linear, Moebius, Polynomial, evaluate, jacobian
from holoretract.norms import Euclidean, Sup, norm_eval
from holoretract.projections import ProjectionBundle, NormCertificate, property_v_supsource
from holoretract.retraction import (NoNormOneProjection, build_retraction, choose_projection,
                                    conjugate_to_origin, conjugation_report, retract_at_point,
                                    verify_linearity_of_pi_f)

from instances import euclid_embedding, sup_isometry

P1 = np.diag([1.0, 0.0])


def first_coordinate_bundle():
    L = np.array([[1.0], [0.0]])
    return property_v_supsource(L, Sup(2))


# ---------------------------------------------------------------- Cartan linearity

def test_linearity_examples():
    rep = verify_linearity_of_pi_f(parabola_map(), P1)
    assert rep.passed and rep.max_modulus <= 1e-12
    rep = verify_linearity_of_pi_f(Linear(np.array([[1.0], [0.5]])), np.array([[1, 0], [0.5, 0]]))
    assert rep.passed and rep.max_modulus <= 1e-12


def test_linearity_negative_control():
    rep = verify_linearity_of_pi_f(parabola_map(), np.diag([0.0, 1.0]))
    assert not rep.passed
    assert rep.worst_multi_index == (2,)
    assert rep.max_modulus == pytest.approx(0.5, abs=1e-12)


# ---------------------------------------------------------------- construction

def test_parabola_retraction():
    b = build_retraction(parabola_map(), Sup(1), Sup(2), first_coordinate_bundle())
    assert max(b.verification["residuals"].values()) <= 1e-8
    rng = np.random.default_rng(0)
    Y = 0.9 * rng.random((50, 2)) * np.exp(2j * np.pi * rng.random((50, 2)))
    R = evaluate(b.r, Y)
    assert np.allclose(R, np.stack([Y[:, 0], Y[:, 0] ** 2 / 2], axis=1), atol=1e-15)
    assert np.abs(evaluate(b.r, R) - R).max() <= 1e-15
    assert np.allclose(evaluate(b.g, Y), Y[:, :1], atol=1e-15)
    assert np.allclose(jacobian(b.r, np.zeros(2)), b.pi.pi)
    assert b.verification["reverse_norm"]["value"] == pytest.approx(1, abs=1e-9)


def test_linear_isometry_retraction_is_the_projection():
    rng = np.random.default_rng(1)
    L = sup_isometry(rng, 2, 4)
    pi = property_v_supsource(L, Sup(4))
    b = build_retraction(Linear(L), Sup(2), Sup(4), pi)
    assert max(b.verification["residuals"].values()) <= 1e-9
    Y = 0.5 * (rng.standard_normal((20, 4)) + 1j * rng.standard_normal((20, 4))) / 3
    assert np.allclose(evaluate(b.r, Y), Y @ pi.pi.T, atol=1e-12)
    # psi vanishes identically on the range
    assert np.abs(evaluate(b.psi, Y @ pi.pi.T)).max() <= 1e-12


def test_euclidean_target_linear_embedding():
    rng = np.random.default_rng(2)
    u = euclid_embedding(rng, 3)
    pi = choose_projection(u, Sup(1), Euclidean(3))
    b = build_retraction(Linear(u), Sup(1), Euclidean(3), pi)
    assert max(b.verification["residuals"].values()) <= 1e-9


def test_bidisk_embedding_retraction():
    f = bidisk_embedding()
    pi = choose_projection(jacobian(f, np.zeros(2)), Sup(2), Sup(3))
    b = build_retraction(f, Sup(2), Sup(3), pi, samples=100)
    assert max(b.verification["residuals"].values()) <= 1e-8
    assert b.verification["max_norm_r_on_samples"] < 1


def test_bundle_serializes():
    b = build_retraction(parabola_map(), Sup(1), Sup(2), first_coordinate_bundle())
    d = b.to_dict()
    assert set(d) >= {"f", "r", "g", "psi", "phi", "pi", "verification"}


# ---------------------------------------------------------------- loud failures

def test_over_norm_projection_fails_loudly():
    # a projection onto the range of z -> (z, 0) with norm 2: (y1, y2) -> (y1 + y2, 0)
    L = np.array([[1.0], [0.0]])
    pi = np.array([[1.0, 1.0], [0.0, 0.0]])
    bundle = ProjectionBundle(pi=pi, range_basis=[L[:, 0]], complement_basis=[np.array([1, -1.0])],
                              H=np.array([[1.0, 1.0]]),
                              norm_certificate=NormCertificate(2.0, True, method="row_sum"))
    with pytest.raises(VerificationFailure):
        build_retraction(Linear(L), Sup(1), Sup(2), bundle)


def test_non_isometric_derivative_refused():
    f = Linear(np.array([[0.5], [0.0]]))
    with pytest.raises(NotAnIsometry):
        build_retraction(f, Sup(1), Sup(2), first_coordinate_bundle())


def test_cartan_failure_is_reported():
    # z -> (z, z^2/2) with the projection (y1, y2) -> (y1 + y2/2 ... ) would not be linear on f;
    # use pi = [[1, 1], [0, 0]], which fixes (1, 0) but sees the z^2 term
    pi = np.array([[1.0, 1.0], [0.0, 0.0]])
    bundle = ProjectionBundle(pi=pi, range_basis=[np.array([1.0, 0])],
                              complement_basis=[np.array([1, -1.0])], H=np.array([[1.0, 1.0]]),
                              norm_certificate=NormCertificate(2.0, True))
    with pytest.raises(LinearityViolation) as info:
        build_retraction(parabola_map(), Sup(1), Sup(2), bundle)
    assert info.value.multi_index == (2,)
    assert info.value.modulus == pytest.approx(0.5, abs=1e-12)


def test_choose_projection_refuses_counterexample():
    from holoretract.fixtures import COUNTEREXAMPLE_L, counterexample_norm
    with pytest.raises(NoNormOneProjection):
        choose_projection(COUNTEREXAMPLE_L, counterexample_norm(), Sup(3))


# ---------------------------------------------------------------- moving the base point

def test_conjugation_examples():
    a = np.array([0.2, -0.5j])
    ft = conjugate_to_origin(Identity(2), a)
    rng = np.random.default_rng(3)
    X = 0.9 * rng.random((30, 2)) * np.exp(2j * np.pi * rng.random((30, 2)))
    assert np.abs(evaluate(ft, X) - X).max() <= 1e-14
    f = Moebius(np.array([0.5]))
    ft = conjugate_to_origin(f, [-0.5])
    assert abs(evaluate(f, [-0.5])[0]) <= 1e-16
    assert abs(evaluate(ft, [0.0])[0]) <= 1e-16


def test_conjugation_chain_rule():
    f = offcenter_map()
    rep = conjugation_report(f, OFFCENTER_A, samples=100)
    assert rep["f_tilde_at_0"] <= 1e-14
    assert rep["chain_rule_deviation"] <= 1e-9
    assert rep["carath_isometry_deviation_at_a"] <= 1e-9


def test_retract_at_point_offcenter():
    out = retract_at_point(offcenter_map(), OFFCENTER_A, tol=1e-7)
    assert max(out["original_residuals"].values()) <= 1e-7
    f = offcenter_map()
    rng = np.random.default_rng(4)
    X = 0.8 * rng.random((20, 2)) * np.exp(2j * np.pi * rng.random((20, 2)))
    fx = evaluate(f, X)
    assert np.abs(evaluate(out["R"], fx) - fx).max() <= 1e-9
    assert np.abs(evaluate(out["G"], fx) - X).max() <= 1e-9
    # R maps the polydisk into f(polydisk)
    Y = 0.9 * rng.random((20, 3)) * np.exp(2j * np.pi * rng.random((20, 3)))
    RY = evaluate(out["R"], Y)
    assert np.abs(evaluate(f, evaluate(out["G"], RY)) - RY).max() <= 1e-9
    assert norm_eval(Sup(3), RY).max() < 1


@pytest.mark.parametrize("make", [parabola_map, bidisk_embedding])
def test_retraction_invariants_on_a_thousand_points(make):
    f = make()
    n, m = f.dim_in, f.dim_out
    b = build_retraction(f, Sup(n), Sup(m), choose_projection(jacobian(f, np.zeros(n)), Sup(n), Sup(m)))
    rng = np.random.default_rng(9)
    Y = 0.99 * rng.random((1000, m)) * np.exp(2j * np.pi * rng.random((1000, m)))
    R = evaluate(b.r, Y)
    assert np.linalg.norm(evaluate(b.r, R) - R, axis=1).max() <= 1e-8
    assert np.linalg.norm(R - evaluate(f, evaluate(b.g, R)), axis=1).max() <= 1e-8
    X = 0.99 * rng.random((1000, n)) * np.exp(2j * np.pi * rng.random((1000, n)))
    assert np.linalg.norm(evaluate(b.g, evaluate(f, X)) - X, axis=1).max() <= 1e-8


def test_counterexample_style_projection_is_rejected():
    # the best projection onto {(x, y, x + y)} has norm 4/3; with the pulled-back source
    # the map is an isometry, so only the projection-norm check can (and must) fail
    from holoretract.fixtures import COUNTEREXAMPLE_L, counterexample_norm
    from holoretract.linalg import pseudo_inverse
    from holoretract.projections import min_projection_norm
    mp = min_projection_norm(list(COUNTEREXAMPLE_L.T), Sup(3))
    assert mp.value > 1.05
    bundle = ProjectionBundle(pi=mp.pi, range_basis=list(COUNTEREXAMPLE_L.T), complement_basis=[],
                              H=pseudo_inverse(COUNTEREXAMPLE_L) @ mp.pi,
                              norm_certificate=NormCertificate(mp.value, False, mp.lower, mp.upper))
    with pytest.raises((LinearityViolation, VerificationFailure)):
        build_retraction(Linear(COUNTEREXAMPLE_L), counterexample_norm(), Sup(3), bundle)
