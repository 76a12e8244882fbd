"""Norm-one projections, Carathéodory isometries and holomorphic retractions
between unit balls of finite-dimensional complex normed spaces."""

__version__ = "0.1.0"

from .errors import (DimensionError, DomainError, HoloRetractError, Infeasible,
                     LinearityViolation, NotAnIsometry, NumericalFailure, RankDeficient,
                     VanishingViolation, VerificationFailure, WrongNormKind)
from .linalg import kernel_basis, pseudo_inverse, solve_least_squares
from .norms import (Euclidean, Polyhedral, Pullback, Sup, dual_norm_eval, norm_eval,
                    operator_norm, unit_sphere_sample)
from .holomap import (Compose, Identity, Linear, Moebius, Polynomial, Sum, evaluate, jacobian,
                      moebius_automorphism, moebius_inverse, taylor_coeff)
from .caratheodory import (carath_origin, carath_supball, functional_lower_bound,
                           isometry_check, kobayashi_origin, schwarz_pick_check)
from .projections import (counterexample_obstruction, min_norm_extension, min_projection_norm,
                          project_hilbert, property_v_c0, property_v_supsource,
                          support_index_certificate)
from .retraction import (build_retraction, conjugate_to_origin, retract_at_point,
                         verify_linearity_of_pi_f)
