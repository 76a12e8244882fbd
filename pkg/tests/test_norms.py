import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize

from holoretract.errors import DimensionError, NumericalFailure, RankDeficient
from holoretract.norms import (Euclidean, Polyhedral, Pullback, Sup, ball_sample,
                               dual_norm_certificate, dual_norm_eval, norm_eval,
                               norming_functional, operator_norm, unit_sphere_sample)

from instances import crandn

L6 = np.array([[1, 0], [0, 1], [1, 1]], dtype=complex)


def random_norm(rng, n):
    kind = rng.integers(4)
    if kind == 0:
        return Sup(n)
    if kind == 1:
        return Euclidean(n)
    if kind == 2:
        return Polyhedral(crandn(rng, n + rng.integers(0, 3), n))
    inner = Euclidean(n + 1) if rng.integers(2) else Sup(n + 1)
    return Pullback(crandn(rng, n + 1, n), inner)


# ---------------------------------------------------------------- evaluation

@pytest.mark.parametrize("N, x, expected", [
    (Sup(3), [1, -2j, 0.5], 2.0),
    (Euclidean(2), [3, 4j], 5.0),
    (Pullback(L6, Sup(3)), [1, 1], 2.0),
])
def test_norm_eval_examples(N, x, expected):
    assert norm_eval(N, x) == pytest.approx(expected, abs=1e-15)
    assert N(x) == norm_eval(N, x)


def test_batched_evaluation_matches_single():
    rng = np.random.default_rng(0)
    N = Pullback(L6, Sup(3))
    X = crandn(rng, 7, 2)
    assert np.allclose(norm_eval(N, X), [norm_eval(N, x) for x in X])


def test_construction_rejects_degenerate_norms():
    with pytest.raises(RankDeficient):
        Polyhedral([[1, 1], [2, 2]])
    with pytest.raises(RankDeficient):
        Pullback([[1, 1], [1, 1], [0, 0]], Sup(3))
    with pytest.raises(DimensionError):
        norm_eval(Sup(2), [1, 2, 3])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_norm_axioms(n, seed):
    rng = np.random.default_rng(seed)
    N = random_norm(rng, n)
    x, y = crandn(rng, n), crandn(rng, n)
    lam = complex(*rng.standard_normal(2))
    assert norm_eval(N, x + y) <= norm_eval(N, x) + norm_eval(N, y) + 1e-12
    assert norm_eval(N, lam * x) == pytest.approx(abs(lam) * norm_eval(N, x), rel=1e-12)
    assert norm_eval(N, np.zeros(n)) == 0
    assert norm_eval(N, x) > 0


# ---------------------------------------------------------------- duality

@pytest.mark.parametrize("N, g, expected", [
    (Sup(3), [1, 1, -1], 3.0),
    (Euclidean(2), [0.6, 0.8], 1.0),
])
def test_dual_norm_examples(N, g, expected):
    assert dual_norm_eval(N, g) == pytest.approx(expected, abs=1e-12)


def pullback_dual_oracle(g, starts=200, seed=0):
    """Brute-force sup of |<g, x>| over the unit sphere of Pullback(L6, Sup(3))."""
    N = Pullback(L6, Sup(3))
    g = np.asarray(g, dtype=complex)

    def neg(p):
        x = p[:2] + 1j * p[2:]
        nx = norm_eval(N, x)
        return -abs(g @ x) / nx if nx > 0 else 0.0

    rng = np.random.default_rng(seed)
    # grid over phases and moduli of the second coordinate, first fixed to 1
    best = 0.0
    for r in np.linspace(0, 2, 81):
        for t in np.linspace(0, 2 * np.pi, 73):
            best = max(best, -neg(np.array([1, r * np.cos(t), 0, r * np.sin(t)])))
            best = max(best, -neg(np.array([r * np.cos(t), 1, r * np.sin(t), 0])))
    for _ in range(starts // 10):
        res = minimize(neg, rng.standard_normal(4), method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        best = max(best, -res.fun)
    return best


# Frozen output of pullback_dual_oracle([1, 0]); re-derived in the test below.
PULLBACK_DUAL_E1 = 1.0


def test_pullback_dual_first_coordinate():
    oracle = pullback_dual_oracle([1, 0])
    assert oracle == pytest.approx(PULLBACK_DUAL_E1, abs=1e-6)
    d = dual_norm_certificate(Pullback(L6, Sup(3)), [1, 0], tol=1e-9)
    assert 0 <= d.lower <= d.upper
    assert d.value == pytest.approx(PULLBACK_DUAL_E1, abs=1e-6)
    assert d.upper - d.lower <= 1e-8


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_dual_certificate_witness_and_norming(n, seed):
    rng = np.random.default_rng(seed)
    N = random_norm(rng, n)
    g = crandn(rng, n)
    d = dual_norm_certificate(N, g, tol=1e-8)
    assert d.lower <= d.upper + 1e-12
    assert d.upper - d.lower <= 1e-8 * max(1, d.upper) + 1e-12
    # witness is a unit vector nearly achieving the lower bound (exactly for closed forms)
    assert norm_eval(N, d.witness) == pytest.approx(1, abs=1e-9)
    slack = 1e-12 if isinstance(N, (Sup, Euclidean)) else 1e-6
    assert abs(g @ d.witness) >= d.lower - slack * max(1, d.upper)
    # no sampled unit vector beats the upper bound
    for x in unit_sphere_sample(N, 50, seed % 1000):
        assert abs(g @ x) <= d.upper * (1 + 1e-9) + 1e-12
    # norming functional: <h, v> = ||v|| with dual norm 1
    v = crandn(rng, n)
    h = norming_functional(N, v)
    assert (h @ v).real == pytest.approx(norm_eval(N, v), rel=1e-10)
    assert abs((h @ v).imag) < 1e-10 * norm_eval(N, v)
    assert dual_norm_eval(N, h, tol=1e-8) == pytest.approx(1, abs=1e-6)


# ---------------------------------------------------------------- operator norm

@pytest.mark.parametrize("A, src, dst, expected, exact", [
    (np.eye(2), Sup(2), Sup(2), 1.0, True),
    ([[1, 0.5], [0, 1]], Sup(2), Sup(2), 1.5, True),
    (L6, Sup(2), Sup(3), 2.0, True),
])
def test_operator_norm_examples(A, src, dst, expected, exact):
    value, witness, ex = operator_norm(A, src, dst)
    assert value == expected
    assert ex is exact
    assert norm_eval(dst, np.asarray(A) @ witness) == pytest.approx(expected)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**31 - 1))
def test_operator_norm_dominates_samples(n, m, seed):
    rng = np.random.default_rng(seed)
    src, dst = random_norm(rng, n), random_norm(rng, m)
    A = crandn(rng, m, n)
    xs = np.array(unit_sphere_sample(src, 2000, seed % 997))
    sampled = norm_eval(dst, xs @ A.T).max()
    try:
        on = operator_norm(A, src, dst, tol=1e-7)
    except NumericalFailure as exc:
        # allowed for polyhedral -> Euclidean pairs; the bracket must still be valid
        assert dst.reduced()[0] == "euclid" and src.reduced()[0] == "poly"
        assert exc.lower <= exc.upper and sampled <= exc.upper * (1 + 1e-9)
        return
    assert on.lower <= on.upper
    assert on.upper - on.lower <= 1e-7 * max(1, on.upper)
    assert sampled <= on.upper * (1 + 1e-9)
    assert norm_eval(dst, A @ on.witness) >= on.lower * (1 - 1e-7) - 1e-12


def test_polydisk_to_euclid_against_torus_grid():
    rng = np.random.default_rng(5)
    A = crandn(rng, 3, 2)
    on = operator_norm(A, Sup(2), Euclidean(3), tol=1e-9)
    t = np.linspace(0, 2 * np.pi, 721)
    # one phase can be fixed; grid over the other
    Z = np.stack([np.ones_like(t), np.exp(1j * t)], axis=1)
    grid = np.linalg.norm(Z @ A.T, axis=1).max()
    assert grid <= on.upper + 1e-12
    assert on.upper - grid < 1e-4


# ---------------------------------------------------------------- sampling

def test_sampling_contract():
    (z,) = unit_sphere_sample(Sup(1), 1, seed=4)
    assert abs(abs(z[0]) - 1) < 1e-15
    for N in (Sup(3), Euclidean(2), Pullback(L6, Sup(3)), Polyhedral(L6)):
        xs = unit_sphere_sample(N, 100, seed=1)
        assert all(abs(norm_eval(N, x) - 1) <= 1e-12 for x in xs)
        assert all(np.array_equal(a, b) for a, b in zip(xs, unit_sphere_sample(N, 100, seed=1)))
        pts = ball_sample(N, 50, seed=2, radius=0.5)
        assert max(norm_eval(N, p) for p in pts) < 0.5


@pytest.mark.parametrize("seed", range(5))
def test_sup_operator_norm_against_ten_thousand_samples(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 6)), int(rng.integers(1, 5))
    A = crandn(rng, m, n)
    on = operator_norm(A, Sup(n), Sup(m))
    xs = np.array(unit_sphere_sample(Sup(n), 10_000, seed))
    sampled = norm_eval(Sup(m), xs @ A.T).max()
    assert sampled <= on.value + 1e-9
    assert norm_eval(Sup(m), A @ on.witness) == pytest.approx(on.value, abs=1e-9)
    assert norm_eval(Sup(n), on.witness) == pytest.approx(1, abs=1e-12)
