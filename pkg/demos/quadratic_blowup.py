#!/usr/bin/env python3
"""Estimate the blow-up time of x' = x^2, x(0) = 1/2 (true answer: tau = 2).

Walks through a single adaptive solve, then sweeps the tolerance to show the
first-order error decay and the O(1/eps) step count, and contrasts the
adaptive step law with uniform stepping and the second-order Taylor variant.
"""
import blowup as bl

entry = bl.catalog.get("sq")
eps = 2.0**-12

print("== single run, adaptive law ==")
res = bl.solve_1d(entry.problem, eps)
print(f"eps          = 2^-12")
print(f"radius r(eps)= {res.radius_used:g}   (solves b(r) = eps^-2, so r = 1/eps)")
print(f"tau estimate = {res.tau_hat:.10f}")
print(f"|tau - 2|    = {abs(res.tau_hat - 2.0):.3e}  ({abs(res.tau_hat - 2.0) / eps:.2f} eps)")
print(f"steps        = {res.steps}")

print("\n== tolerance sweep: adaptive vs taylor2 vs uniform ==")
grid = [2.0**-k for k in range(6, 17)]
table = bl.run_study("sq", ["adaptive", "taylor2", "uniform"], grid)
print(f"{'eps':>10} {'adaptive N':>11} {'taylor2 N':>10} {'uniform N':>10} {'adaptive err':>13}")
by = {(r.method, r.epsilon): r for r in table.rows}
for e in grid:
    print(
        f"{e:>10.2e} {by[('adaptive', e)].steps:>11} {by[('taylor2', e)].steps:>10} "
        f"{by[('uniform', e)].steps:>10} {by[('adaptive', e)].error:>13.3e}"
    )

print("\nfitted log2-log2 slopes (error, cost):")
for method in ("adaptive", "taylor2", "uniform"):
    rates = table.fitted[method]
    print(f"  {method:>9}: error {rates.error.slope:+.2f}, cost {rates.cost.slope:+.2f}")
print("\nadaptive cost grows like 1/eps; taylor2 like 1/sqrt(eps); uniform pays")
print("an extra log(1/eps) factor, visible in the widening N ratio above.")

bl.emit_csv(table, "quadratic_study.csv")
bl.emit_svg(table, "quadratic_error.svg", bl.AXIS_ERROR)
bl.emit_svg(table, "quadratic_cost.svg", bl.AXIS_COST)
print("\nwrote quadratic_study.csv, quadratic_error.svg, quadratic_cost.svg")
