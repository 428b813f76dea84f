"""Truncation-radius rules r(eps) and the tail bounds they guarantee.

Each rule picks r(eps) so that the hitting time of radius r(eps) is within
O(eps) of the true blow-up time. Rules that only define r implicitly (through
b(r) = F^-1(eps) or b'(r) = eps^-1 log(eps^-1)) are solved by bracketed
bisection plus a few Newton polish steps.

Radii that would exceed the float64 range are clamped to RADIUS_CAP; callers
should surface a warning when they receive the cap, since the tail bound is
then no longer <= eps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import SolverError
from .problems import POLYNOMIAL, ScalarProblem

# Largest radius we let a rule request. Keeps r, b(r) and the iterates finite
# in float64; well below the 1e300 overflow guard of the solvers.
RADIUS_CAP = 1e250


class BracketFailure(SolverError):
    """No sign change found within 200 doublings/halvings of the start point."""


class NonMonotone(SolverError):
    """The sampled function decreased across the bracket."""


@dataclass(frozen=True)
class FInverse:
    """Radius solving b(r) = f_inv(eps); the classic 1D route."""

    f_inv: Callable[[float], float]


@dataclass(frozen=True)
class BPrimeLog:
    """Radius solving b'(r) = eps^-1 * log(eps^-1); 1D alternative route.

    ``tail_constant`` is the C in the standing bound x <= b'(x)^C; it scales
    the tail estimate only, never the radius.
    """

    tail_constant: float = 1.0


@dataclass(frozen=True)
class ExplicitRadius:
    """User-supplied closed form r(eps). ``tail_is_eps`` records whether the
    closed form was constructed so that the tail integral equals eps exactly."""

    r_of_eps: Callable[[float], float]
    tail_is_eps: bool = True


@dataclass(frozen=True)
class PolyND:
    """r(eps) = (1/(c_check*alpha*eps))^(1/alpha) from the polynomial growth bound."""


@dataclass(frozen=True)
class LogND:
    """r(eps) = exp((1/(c_check*alpha*eps))^(1/alpha)) for slow (log) growth."""


ThresholdRule = FInverse | BPrimeLog | ExplicitRadius | PolyND | LogND


def _solve_increasing(f, fprime, start: float, target: float) -> float:
    """Solve f(x) = target for increasing f by bracket expansion + bisection.

    Brackets by geometric doubling (or halving, if f(start) already exceeds
    the target). Bisection runs to relative width 1e-12, then up to three
    Newton steps polish the root when a derivative is available.
    """
    if not (target > 0 and math.isfinite(target)):
        raise BracketFailure(f"target {target!r} is not a positive finite value")

    def probe(x):
        try:
            v = float(f(x))
        except (OverflowError, ValueError):
            return math.inf
        if math.isnan(v):
            return math.inf
        return v

    f_start = probe(start)
    lo = hi = start
    f_lo = f_hi = f_start
    if f_start < target:
        for _ in range(200):
            lo, f_lo = hi, f_hi
            hi *= 2.0
            f_hi = probe(hi)
            if f_hi < f_lo and math.isfinite(f_hi):
                raise NonMonotone(f"f({hi!r}) = {f_hi!r} < f({lo!r}) = {f_lo!r}")
            if f_hi >= target:
                break
        else:
            raise BracketFailure(f"no bracket above {start!r} after 200 doublings")
    elif f_start > target:
        for _ in range(200):
            hi, f_hi = lo, f_lo
            lo *= 0.5
            f_lo = probe(lo)
            if math.isfinite(f_lo) and f_lo > f_hi:
                raise NonMonotone(f"f({lo!r}) = {f_lo!r} > f({hi!r}) = {f_hi!r}")
            if f_lo <= target:
                break
        else:
            raise BracketFailure(f"no bracket below {start!r} after 200 halvings")
    else:
        return start

    while hi - lo > 1e-12 * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if probe(mid) < target:
            lo = mid
        else:
            hi = mid

    x = 0.5 * (lo + hi)
    if fprime is not None:
        for _ in range(3):
            try:
                d = float(fprime(x))
            except (OverflowError, ValueError):
                break
            if not math.isfinite(d) or d <= 0:
                break
            fx = probe(x)
            if not math.isfinite(fx):
                break
            step = (fx - target) / d
            nxt = x - step
            if not math.isfinite(nxt) or nxt < 0.5 * lo or nxt > 2.0 * hi:
                break
            x = nxt
    return x


def _capped(r: float) -> float:
    if not math.isfinite(r) or r > RADIUS_CAP:
        return RADIUS_CAP
    return r


def radius(rule: ThresholdRule, problem, epsilon: float) -> float:
    """Truncation radius r(eps) for the given rule; clamped to RADIUS_CAP."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    if isinstance(rule, FInverse):
        target = float(rule.f_inv(epsilon))
        return _capped(_solve_increasing(problem.rhs, problem.rhs_deriv, problem.x0, target))
    if isinstance(rule, BPrimeLog):
        target = math.log(1.0 / epsilon) / epsilon
        return _capped(
            _solve_increasing(problem.rhs_deriv, problem.rhs_second, problem.x0, target)
        )
    if isinstance(rule, ExplicitRadius):
        try:
            r = float(rule.r_of_eps(epsilon))
        except OverflowError:
            r = math.inf
        return _capped(r)
    if isinstance(rule, PolyND):
        g = problem.growth
        return _capped((1.0 / (g.c_check * g.alpha * epsilon)) ** (1.0 / g.alpha))
    if isinstance(rule, LogND):
        g = problem.growth
        exponent = (1.0 / (g.c_check * g.alpha * epsilon)) ** (1.0 / g.alpha)
        if exponent > 700.0:
            return RADIUS_CAP
        return _capped(math.exp(exponent))
    raise TypeError(f"unknown threshold rule {rule!r}")


def rule_for_growth(growth) -> ThresholdRule:
    """Default R^n rule implied by the growth specification."""
    return PolyND() if growth.kind == POLYNOMIAL else LogND()


def tau_tail_bound(rule: ThresholdRule, problem, epsilon: float) -> float:
    """Analytic bound on |tau - tau_r(eps)| implied by the rule.

    The capped-radius regime is NOT reflected here: this is the uncapped
    design bound (eps for all rules except BPrimeLog, whose construction gives
    (C+1)*log(b'(r))/b'(r)). Returns NaN for explicit radii with unknown tail.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    if isinstance(rule, (FInverse, PolyND, LogND)):
        return epsilon
    if isinstance(rule, ExplicitRadius):
        return epsilon if rule.tail_is_eps else math.nan
    if isinstance(rule, BPrimeLog):
        r = radius(rule, problem, epsilon)
        bp = float(problem.rhs_deriv(r))
        if bp <= 0:
            return math.nan
        return (rule.tail_constant + 1.0) * math.log(bp) / bp
    raise TypeError(f"unknown threshold rule {rule!r}")


def scalar_radius(problem: ScalarProblem, epsilon: float) -> float:
    return radius(problem.threshold, problem, epsilon)
