"""Forward-Euler hitting-time solvers with a priori adaptive steps.

The 1D loop advances x <- x + b(x)h while x < r(eps) (strict guard); the R^n
loop advances while |x| <= r(eps). In both cases the accumulated time at the
first crossing is the blow-up estimate. Step sizes come from the law selected
in SolverConfig; see the stepping module for the laws themselves.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from . import linalg, stepping, thresholds
from .errors import SolverError
from .problems import (
    LOGARITHMIC,
    RunResult,
    ScalarProblem,
    VectorProblem,
    structural_violations,
)
from .stepping import (
    Adaptive1D,
    AdaptiveND,
    AltND,
    LogNDImplicitN,
    PowerUniformND,
    RDCapped,
    StepLaw,
    Taylor1D,
    Uniform1D,
    UniformND,
)


class StepBudgetExceeded(SolverError):
    """The loop hit max_steps before the state reached the radius."""


class Overflow(SolverError):
    """The state exceeded the overflow guard before reaching the radius,
    which indicates an inconsistent threshold rule (or a wild problem)."""


class FixedPointDivergence(SolverError):
    """The implicit-N outer iteration failed to settle within its budget."""


@dataclass(frozen=True)
class SolverConfig:
    law: Optional[StepLaw] = None
    max_steps: int = 2**30
    record_trace: bool = False
    overflow_guard: float = 1e300

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


def _base_warnings(problem) -> list[str]:
    viol = structural_violations(problem)
    return [f"structural violation: {v}" for v in viol]


def _radius_warning(r: float) -> list[str]:
    if r >= thresholds.RADIUS_CAP:
        return [
            f"radius capped at {thresholds.RADIUS_CAP:g} (float64 range); "
            "tail bound is no longer <= eps"
        ]
    return []


def solve_1d(problem: ScalarProblem, eps: float, cfg: SolverConfig | None = None) -> RunResult:
    """Estimate the 1D blow-up time by integrating to the threshold radius."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    cfg = cfg or SolverConfig()
    law = cfg.law if cfg.law is not None else Adaptive1D()
    warnings = _base_warnings(problem)

    r = thresholds.radius(problem.threshold, problem, eps)
    warnings += _radius_warning(r)

    b = problem.rhs
    bd = problem.rhs_deriv
    k = problem.k
    x = float(problem.x0)
    t = 0.0
    n = 0
    trace = [(0.0, x)] if cfg.record_trace else None
    max_steps = cfg.max_steps
    guard = cfg.overflow_guard

    sqrt = math.sqrt
    start = time.perf_counter()
    if x < r:
        if isinstance(law, Adaptive1D):
            while x < r:
                if n >= max_steps:
                    raise StepBudgetExceeded(f"exceeded {max_steps} steps at x = {x!r}")
                if x > guard or x != x:
                    raise Overflow(f"state {x!r} exceeded guard {guard:g} below r = {r!r}")
                probe = k * x
                if probe > r:
                    probe = r
                d = bd(probe)
                if d <= 0.0:
                    raise stepping.NonpositiveDerivative(f"b'({probe!r}) = {d!r}")
                h = eps / sqrt(d)
                x = x + b(x) * h
                t += h
                n += 1
                if trace is not None:
                    trace.append((t, x))
        elif isinstance(law, Taylor1D):
            if law.m_bar != 2:
                raise ValueError("only the second-order Taylor variant is implemented")
            while x < r:
                if n >= max_steps:
                    raise StepBudgetExceeded(f"exceeded {max_steps} steps at x = {x!r}")
                if x > guard or x != x:
                    raise Overflow(f"state {x!r} exceeded guard {guard:g} below r = {r!r}")
                h = stepping.h_taylor_1d(eps, x, k, r, bd, 2)
                bx = b(x)
                # second derivative of the solution via the chain rule: x'' = b'(x) b(x)
                x = x + bx * h + 0.5 * bd(x) * bx * h * h
                t += h
                n += 1
                if trace is not None:
                    trace.append((t, x))
        elif isinstance(law, Uniform1D):
            h = stepping.h_uniform_1d(eps, x, r, b, bd)
            while x < r:
                if n >= max_steps:
                    raise StepBudgetExceeded(f"exceeded {max_steps} steps at x = {x!r}")
                if x > guard or x != x:
                    raise Overflow(f"state {x!r} exceeded guard {guard:g} below r = {r!r}")
                x = x + b(x) * h
                t += h
                n += 1
                if trace is not None:
                    trace.append((t, x))
        else:
            raise TypeError(f"{law!r} is not a 1D step law")
    else:
        warnings.append(f"degenerate radius: r = {r!r} <= x0 = {x!r}; no steps taken")
    wall = time.perf_counter() - start

    return RunResult(
        tau_hat=t,
        steps=n,
        final_state=x,
        radius_used=r,
        epsilon=eps,
        wall_time=wall,
        trace=tuple(trace) if trace is not None else None,
        warnings=tuple(warnings),
        meta={"law": type(law).__name__},
    )


_safe_norm = linalg.safe_norm


def _nd_step_size(law, problem, eps, r, seed):
    """Return h(x, bx) for the R^n laws, or a constant for the uniform ones."""
    jac = problem.jacobian
    dim = problem.dim
    sqrt = math.sqrt

    if isinstance(law, AdaptiveND):
        def h_of(x, bx):
            sn = linalg.spectral_norm(jac, x, dim, seed)
            return eps / sqrt(sn if sn > 1.0 else 1.0)
        return h_of

    if isinstance(law, (AltND, RDCapped)):
        cap = law.cap if isinstance(law, RDCapped) else None
        jvp = jac.jvp if jac.jvp is not None else None
        dense = jac.dense

        def h_of(x, bx):
            w = jvp(x, bx) if jvp is not None else dense(x) @ bx
            jn = _safe_norm(w)
            if jn <= 0.0:
                sn = linalg.spectral_norm(jac, x, dim, seed)
                h = eps / sqrt(sn if sn > 1.0 else 1.0)
            else:
                h = eps * sqrt(_safe_norm(bx)) / sqrt(jn)
            if cap is not None and h > cap:
                h = cap
            return h
        return h_of

    if isinstance(law, LogNDImplicitN):
        if law.n_guess < 1:
            raise ValueError("LogNDImplicitN needs n_guess >= 1 here; use solve_log_nd")
        n_guess = law.n_guess

        def h_of(x, bx):
            sn = linalg.spectral_norm(jac, x, dim, seed)
            return sqrt(eps / (n_guess * (sn if sn > 1.0 else 1.0)))
        return h_of

    if isinstance(law, UniformND):
        h = stepping.h_uniform_nd(eps, r)
        if law.cap is not None:
            h = min(h, law.cap)
        return h

    if isinstance(law, PowerUniformND):
        return eps ** law.exponent

    raise TypeError(f"{law!r} is not an R^n step law")


def solve_nd(
    problem: VectorProblem,
    eps: float,
    cfg: SolverConfig | None = None,
    seed: int = 1,
) -> RunResult:
    """Estimate the blow-up time of a system by integrating to |x| > r(eps)."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    cfg = cfg or SolverConfig()
    law = cfg.law if cfg.law is not None else AdaptiveND()
    warnings = _base_warnings(problem)

    rule = thresholds.rule_for_growth(problem.growth)
    r = thresholds.radius(rule, problem, eps)
    warnings += _radius_warning(r)

    rhs = problem.rhs
    x = np.array(problem.x0, dtype=float)
    t = 0.0
    n = 0
    max_steps = cfg.max_steps
    guard = cfg.overflow_guard

    nx = _safe_norm(x)
    trace = [(0.0, nx)] if cfg.record_trace else None

    start = time.perf_counter()
    degenerate = not (nx <= r)
    if degenerate:
        warnings.append(f"degenerate radius: r = {r!r} < |x0| = {nx!r}; no steps taken")
    else:
        h_rule = _nd_step_size(law, problem, eps, r, seed)
        constant_h = not callable(h_rule)
        with np.errstate(over="ignore", invalid="ignore"):
            while nx <= r:
                if n >= max_steps:
                    raise StepBudgetExceeded(f"exceeded {max_steps} steps at |x| = {nx!r}")
                if nx > guard or not math.isfinite(nx):
                    raise Overflow(
                        f"|state| = {nx!r} exceeded guard {guard:g} below r = {r!r}"
                    )
                bx = rhs(x)
                h = h_rule if constant_h else h_rule(x, bx)
                x = x + bx * h
                t += h
                n += 1
                nx = _safe_norm(x)
                if trace is not None:
                    trace.append((t, nx))
    wall = time.perf_counter() - start

    return RunResult(
        tau_hat=t,
        steps=n,
        final_state=x,
        radius_used=r,
        epsilon=eps,
        wall_time=wall,
        trace=tuple(trace) if trace is not None else None,
        warnings=tuple(warnings),
        meta={"law": type(law).__name__, "radius_rule": type(rule).__name__, "seed": seed},
    )


def solve_log_nd(
    problem: VectorProblem,
    eps: float,
    cfg: SolverConfig | None = None,
    seed: int = 1,
) -> RunResult:
    """Slow-growth solver: the step law needs the unknown step count N, so an
    outer loop guesses N, runs, and accepts once N_actual <= guess <= 4*N_actual.

    The guess starts at ceil(1/eps) and doubles while the run overshoots it;
    if the guess overshoots the other way it is pulled down to N_actual.
    """
    if problem.growth.kind != LOGARITHMIC:
        raise ValueError("solve_log_nd needs a logarithmic growth specification")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    cfg = cfg or SolverConfig()

    n_guess = max(1, math.ceil(1.0 / eps))
    total_steps = 0
    start = time.perf_counter()
    for outer in range(1, 41):
        run_cfg = replace(cfg, law=LogNDImplicitN(n_guess))
        res = solve_nd(problem, eps, run_cfg, seed=seed)
        actual = res.steps
        total_steps += actual
        if actual == 0 or (actual <= n_guess <= 4 * actual):
            wall = time.perf_counter() - start
            meta = dict(res.meta)
            meta.update(
                n_guess=n_guess,
                outer_iterations=outer,
                total_steps_all_iterations=total_steps,
            )
            return replace(res, wall_time=wall, meta=meta)
        if actual > n_guess:
            n_guess *= 2
        else:
            n_guess = max(1, actual)
    raise FixedPointDivergence(
        f"implicit-N iteration did not settle in 40 rounds (last guess {n_guess})"
    )


def solve_separable(
    inner: ScalarProblem,
    G: Callable[[float], float],
    G_inv: Callable[[float], float],
    eps: float,
    cfg: SolverConfig | None = None,
) -> float:
    """Stopping time of x' = g(t) b(x) via tau = G_inv(integral of 1/b + G(0)),
    where G is an antiderivative of g and the integral is estimated by solve_1d
    on the autonomous inner problem."""
    res = solve_1d(inner, eps, cfg)
    return float(G_inv(res.tau_hat + G(0.0)))
