#!/usr/bin/env python3
"""Blow-up of a semi-discretized reaction-diffusion equation.

u_t = u_xx + u^2 on (0,1), u = 0 on the boundary, u(x,0) = 100 sin(pi x),
discretized in space on m subintervals (method of lines). The step law is the
|b'(x)b(x)|-weighted rule clipped at the CFL-style cap 1/(2 m^2).

Desk-scale version of the two published tables: eps-refinement at fixed m and
m-refinement at fixed eps. Expect first-order-in-eps time convergence and
second-order-in-m spatial convergence of the estimates.
"""
import math

import blowup as bl

print("== vary eps at m = 16 ==")
table = bl.run_rd_study("vary-eps", m=16, eps_grid=[2.0**-k for k in range(14, 20)],
                        methods=("adaptive", "uniform"))
print(f"{'eps':>9} {'tau (adaptive)':>16} {'succ diff':>10} {'log2 N':>7}"
      f" {'tau (uniform)':>16} {'log2 N':>7}")
ada = table.method_rows("adaptive")
uni = table.method_rows("uniform")
for a, u in zip(ada, uni):
    diff = "" if a.succ_diff_log2 is None else f"{a.succ_diff_log2:.2f}"
    print(f"{a.epsilon:>9.1e} {a.tau_hat:>16.12f} {diff:>10} {math.log2(a.steps):>7.2f}"
          f" {u.tau_hat:>16.12f} {math.log2(u.steps):>7.2f}")
print("successive differences halve with eps (first order); uniform needs more steps.")

print("\n== vary m at eps = 2^-16 ==")
table = bl.run_rd_study("vary-m", eps=2.0**-16, m_grid=[4, 8, 16, 32, 64],
                        methods=("adaptive",))
print(f"{'m':>4} {'tau':>16} {'succ diff':>10} {'log2 N':>7}")
for row in table.method_rows("adaptive"):
    diff = "" if row.succ_diff_log2 is None else f"{row.succ_diff_log2:.2f}"
    print(f"{row.m:>4} {row.tau_hat:>16.12f} {diff:>10} {math.log2(row.steps):>7.2f}")
print("successive differences drop ~4x per doubling of m (second-order space),")
print("while the adaptive step count barely moves with m.")
for note in table.notes:
    print(f"note: {note}")
