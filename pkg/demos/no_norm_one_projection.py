"""
A subspace of the polydisk space without a norm-one projection
==============================================================

The plane ``{(x, y, x + y)}`` in C^3 with the sup norm. A norm-one
projection would have to kill ``e1`` and ``e2``, because ``(1, 0, 1)``
and ``(0, 1, 1)`` sit on flat faces of the sphere. It would then send
``e3`` to ``(1, 1, 2)`` and could not fix ``(1, 0, 1)``.
"""

import json

from holoretract import counterexample_obstruction

report = counterexample_obstruction()
for key in ("step_a_face_deviation", "step_b_pi_e1_forced_zero", "step_b_pi_e2_forced_zero",
            "step_c_pi_of_1_0_1", "step_c_required", "step_c_contradiction",
            "no_norm_one_projection"):
    print(f"{key:26s} {json.dumps(report[key])}")
best = report["optimal_projection"]
print(f"smallest projection norm: {best['value']:.10f} (certified lower bound {best['lower']:.10f})")
