"""Certified minimization of linear objectives under complex-modulus cones.

Problems have the form::

    minimize    c . z
    subject to  A_eq z = b_eq,   A_ub z <= b_ub,
                |re_p . z + i im_p . z| <= z[t_p]      for every cone p

over real ``z``. Every complex l1 problem in the package (dual norms of
polyhedral norms, minimal-norm functional extensions, minimal projections
onto subspaces of sup-normed spaces) reduces to this shape.

The solver is an outer-approximation (Kelley) cutting-plane loop over an LP
backend: each cone starts as a circumscribed polygon and is refined by a
supporting half-plane at the angle of the current iterate. The LP optimum of
an outer approximation is a lower bound on the true optimum; the true
objective of the iterate, after projecting back onto the equality
constraints, is an upper bound. The loop stops once the bracket closes.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import NumericalFailure

_LP_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}
_INITIAL_ANGLES = 8


@dataclass
class CertifiedSolution:
    z: np.ndarray
    lower: float
    upper: float
    iterations: int
    eq_marginals: np.ndarray

    @property
    def gap(self):
        return self.upper - self.lower


def _cut_rows(re, im, t_idx, angles, nvar):
    rows = np.cos(angles)[:, None] * re + np.sin(angles)[:, None] * im
    rows[np.arange(len(t_idx)), t_idx] -= 1.0
    return rows


def solve_modulus_lp(cost, cone_re, cone_im, cone_t, true_objective,
                     a_eq=None, b_eq=None, a_ub=None, b_ub=None,
                     tol=1e-6, budget=500, bounds=(None, None)):
    """Run the cutting-plane loop.

    ``true_objective(z)`` evaluates the exact objective at a point that
    satisfies the equality constraints; it must be an upper bound on the
    optimum whenever ``z`` is feasible. ``tol`` is absolute on the bracket
    width, relative once the optimum exceeds 1. ``budget`` caps LP solves.

    Raises :class:`NumericalFailure` carrying the best bracket when the budget
    runs out or the LP backend fails.
    """
    cost = np.asarray(cost, dtype=float)
    nvar = cost.size
    cone_re = np.atleast_2d(np.asarray(cone_re, dtype=float))
    cone_im = np.atleast_2d(np.asarray(cone_im, dtype=float))
    cone_t = np.asarray(cone_t, dtype=int)
    if a_eq is not None:
        a_eq = np.atleast_2d(np.asarray(a_eq, dtype=float))
        b_eq = np.asarray(b_eq, dtype=float)
        eq_pinv = np.linalg.pinv(a_eq, rcond=1e-12)
    else:
        eq_pinv = None

    cuts = []
    for k in range(_INITIAL_ANGLES):
        theta = np.full(len(cone_t), 2 * np.pi * k / _INITIAL_ANGLES)
        cuts.append(_cut_rows(cone_re, cone_im, cone_t, theta, nvar))
    cuts = np.vstack(cuts) if cuts else np.zeros((0, nvar))

    best = None
    lower = -np.inf
    for it in range(1, budget + 1):
        A = cuts if a_ub is None else np.vstack([cuts, a_ub])
        b = np.zeros(len(cuts)) if a_ub is None else np.concatenate([np.zeros(len(cuts)), b_ub])
        res = linprog(cost, A_ub=A, b_ub=b, A_eq=a_eq, b_eq=b_eq,
                      bounds=bounds, method="highs", options=_LP_OPTIONS)
        if res.status != 0:
            raise NumericalFailure(f"LP backend failed: {res.message}",
                                   lower=lower, upper=None if best is None else best.upper,
                                   best=best)
        z = res.x
        lower = max(lower, float(res.fun))
        z_fix = z if eq_pinv is None else z + eq_pinv @ (b_eq - a_eq @ z)
        upper = float(true_objective(z_fix))
        marg = np.zeros(0) if a_eq is None else np.asarray(res.eqlin.marginals)
        if best is None or upper < best.upper:
            best = CertifiedSolution(z_fix, lower, upper, it, marg)
        best.lower = lower
        best.iterations = it
        if best.upper - lower <= tol * max(1.0, abs(best.upper)):
            return best

        u = cone_re @ z
        v = cone_im @ z
        mod = np.hypot(u, v)
        viol = mod - z[cone_t]
        active = viol > 1e-13 * np.maximum(1.0, mod)
        if not np.any(active):
            break
        theta = np.arctan2(v[active], u[active])
        cuts = np.vstack([cuts, _cut_rows(cone_re[active], cone_im[active],
                                          cone_t[active], theta, nvar)])
    raise NumericalFailure(
        f"cutting-plane loop stopped with bracket [{lower:.3e}, {best.upper:.3e}]",
        lower=lower, upper=best.upper, best=best)


def complex_l1_min(A, v, tol=1e-6, budget=500):
    """Minimize ``sum_k |c_k|`` subject to ``A c = v`` over complex ``c``.

    Returns ``(c, solution)`` where ``solution`` carries the bracket and
    the LP marginals of the equality rows (ordered real parts, then
    imaginary parts).
    """
    A = np.asarray(A, dtype=complex)
    v = np.asarray(v, dtype=complex)
    m, K = A.shape
    # z = [Re c (K), Im c (K), t (K)]
    nvar = 3 * K
    cost = np.concatenate([np.zeros(2 * K), np.ones(K)])
    a_eq = np.zeros((2 * m, nvar))
    a_eq[:m, :K] = A.real
    a_eq[:m, K:2 * K] = -A.imag
    a_eq[m:, :K] = A.imag
    a_eq[m:, K:2 * K] = A.real
    b_eq = np.concatenate([v.real, v.imag])
    eye = np.eye(K)
    cone_re = np.hstack([eye, np.zeros((K, 2 * K))])
    cone_im = np.hstack([np.zeros((K, K)), eye, np.zeros((K, K))])
    cone_t = 2 * K + np.arange(K)

    def objective(z):
        return np.abs(z[:K] + 1j * z[K:2 * K]).sum()

    sol = solve_modulus_lp(cost, cone_re, cone_im, cone_t, objective,
                           a_eq=a_eq, b_eq=b_eq, tol=tol, budget=budget)
    c = sol.z[:K] + 1j * sol.z[K:2 * K]
    return c, sol
