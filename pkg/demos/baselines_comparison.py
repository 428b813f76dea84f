#!/usr/bin/env python3
"""Adaptive hitting-time stepping against two classic alternatives on x' = x^2.

- Arc-length integration: reparameterize by trajectory arc length so the
  augmented field has unit norm, then use an embedded RK5(4) pair. A
  high-order method, so it wins on cost per accuracy - at the price of extra
  assumptions on the blow-up profile and a tolerance knob of its own.
- Threshold rescaling: divide the state by M = 4 whenever it reaches M and
  rescale time; first-order accurate with O(log(1/eps)) cycles.
"""
import blowup as bl

entry = bl.catalog.get("sq")
print(f"{'eps':>9} {'adaptive err':>13} {'N':>8} {'arclength err':>14} {'cost':>6} "
      f"{'rescaling err':>14} {'N':>8} {'cycles':>6}")
for k in (6, 8, 10, 12):
    eps = 2.0**-k
    ada = bl.solve_1d(entry.problem, eps)
    arc = bl.solve_arclength(entry.problem, eps, rk_tol=1e-10)
    res = bl.solve_rescaling_1d(2.0, 0.5, 4.0, eps)
    print(
        f"{eps:>9.1e} {abs(ada.tau_hat - 2):>13.2e} {ada.steps:>8} "
        f"{abs(arc.tau_hat - 2):>14.2e} {arc.steps:>6} "
        f"{abs(res.tau_hat - 2):>14.2e} {res.steps:>8} {res.meta['cycles']:>6}"
    )
print("\narc-length cost counts RK stage evaluations; the Euler methods count steps.")
print("the fifth-order arc-length method reaches the tolerance with far less work,")
print("but only the hitting-time method carries a priori error and cost guarantees.")
