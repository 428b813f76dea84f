"""Step-size laws, each a pure function of the tolerance and local quantities.

Solvers pick a law via the small marker dataclasses below; the h_* functions
are the laws themselves and can be used standalone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import SolverError


class NonpositiveDerivative(SolverError):
    """b' was <= 0 at the probe point; the 1D laws need b' > 0."""


class DegenerateJVP(SolverError):
    """|b'(x)b(x)| = 0; caller should fall back to the spectral-norm law."""


@dataclass(frozen=True)
class Adaptive1D:
    """h = eps / sqrt(b'(min(k*x, r)))."""


@dataclass(frozen=True)
class Taylor1D:
    """Second (and in principle higher) order Taylor update with
    h = eps^(1/m) / b'(min(k*x, r))^(m/(m+1))."""

    m_bar: int = 2

    def __post_init__(self):
        if self.m_bar < 2:
            raise ValueError("m_bar must be >= 2")


@dataclass(frozen=True)
class Uniform1D:
    """Constant h = min(eps/log(b(r)/b(x0)), 1/(2 b'(r)))."""


@dataclass(frozen=True)
class AdaptiveND:
    """h = eps / sqrt(max(||b'(x)||, 1))."""


@dataclass(frozen=True)
class AltND:
    """h = eps * sqrt(|b(x)|) / sqrt(|b'(x) b(x)|); avoids spectral norms."""


@dataclass(frozen=True)
class LogNDImplicitN:
    """h = sqrt(eps / (N * max(1, ||b'(x)||))); N resolved by an outer
    fixed-point iteration when n_guess == 0 (see integrate.solve_log_nd)."""

    n_guess: int = 0


@dataclass(frozen=True)
class UniformND:
    """Constant h = eps / log(r), optionally clipped to a stability cap."""

    cap: Optional[float] = None


@dataclass(frozen=True)
class PowerUniformND:
    """Constant h = eps^exponent (used where the cost analysis gives eps^(gamma/alpha))."""

    exponent: float


@dataclass(frozen=True)
class RDCapped:
    """AltND clipped to a CFL-type cap (1/(2 m^2) for the reaction-diffusion grid)."""

    cap: float


StepLaw = (
    Adaptive1D
    | Taylor1D
    | Uniform1D
    | AdaptiveND
    | AltND
    | LogNDImplicitN
    | UniformND
    | PowerUniformND
    | RDCapped
)


def h_adaptive_1d(eps: float, xbar: float, k: float, r: float, b_deriv: Callable) -> float:
    """h = eps / sqrt(b'(min(k*xbar, r)))."""
    probe = min(k * xbar, r)
    d = float(b_deriv(probe))
    if d <= 0.0:
        raise NonpositiveDerivative(f"b'({probe!r}) = {d!r}")
    return eps / math.sqrt(d)


def h_taylor_1d(
    eps: float, xbar: float, k: float, r: float, b_deriv: Callable, m_bar: int
) -> float:
    """h = eps^(1/m) / b'(min(k*xbar, r))^(m/(m+1))."""
    if m_bar < 2:
        raise ValueError("m_bar must be >= 2")
    probe = min(k * xbar, r)
    d = float(b_deriv(probe))
    if d <= 0.0:
        raise NonpositiveDerivative(f"b'({probe!r}) = {d!r}")
    return eps ** (1.0 / m_bar) / d ** (m_bar / (m_bar + 1.0))


def h_uniform_1d(eps: float, x0: float, r: float, b: Callable, b_deriv: Callable) -> float:
    """h = min(eps/log(b(r)/b(x0)), 1/(2 b'(r)))."""
    br, b0 = float(b(r)), float(b(x0))
    if not br > b0:
        raise ValueError(f"need b(r) > b(x0), got b({r!r}) = {br!r}, b({x0!r}) = {b0!r}")
    h_bar = eps / math.log(br / b0)
    d = float(b_deriv(r))
    if d <= 0.0:
        raise NonpositiveDerivative(f"b'({r!r}) = {d!r}")
    return min(h_bar, 1.0 / (2.0 * d))


def h_adaptive_nd(eps: float, jac_norm: float) -> float:
    """h = eps / sqrt(max(jac_norm, 1))."""
    return eps / math.sqrt(max(jac_norm, 1.0))


def h_alt_nd(eps: float, b_norm: float, jvp_norm: float) -> float:
    """h = eps * sqrt(b_norm) / sqrt(jvp_norm), with jvp_norm = |b'(x) b(x)|."""
    if jvp_norm <= 0.0:
        raise DegenerateJVP(f"|b'(x) b(x)| = {jvp_norm!r}")
    return eps * math.sqrt(b_norm) / math.sqrt(jvp_norm)


def h_log_nd(eps: float, n_guess: int, jac_norm: float) -> float:
    """h = sqrt(eps / (n_guess * max(1, jac_norm)))."""
    if n_guess < 1:
        raise ValueError("n_guess must be >= 1")
    return math.sqrt(eps / (n_guess * max(1.0, jac_norm)))


def h_uniform_nd(eps: float, r: float) -> float:
    """h = eps / log(r); needs r > e so the constant step stays positive and sane."""
    if not r > math.e:
        raise ValueError(f"uniform n-d law needs r > e, got {r!r}")
    return eps / math.log(r)
