"""Jacobian norm machinery.

Spectral norms (induced matrix 2-norm) are taken from, in order of preference:
a user-supplied closed form, exact eigenvalues for small symmetric matrices,
or power iteration on J^T J with a deterministic seeded start vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BlowupError


class TransposeUnavailable(BlowupError):
    """Matrix-free access without a norm hint cannot produce a 2-norm."""


@dataclass(frozen=True)
class JacobianAccess:
    """Either a dense Jacobian function or a matrix-free (jvp, norm hint) pair.

    Exactly one of ``dense`` and ``jvp`` must be set. ``norm_hint``, when
    present, is a closed form for ||J(x)||_2 and short-circuits everything else.
    """

    dense: Optional[Callable] = None
    jvp: Optional[Callable] = None
    norm_hint: Optional[Callable] = None

    def __post_init__(self):
        if (self.dense is None) == (self.jvp is None):
            raise ValueError("exactly one of dense/jvp must be provided")

    @classmethod
    def from_dense(cls, fn: Callable) -> "JacobianAccess":
        return cls(dense=fn)

    @classmethod
    def matrix_free(cls, jvp: Callable, norm_hint: Callable | None = None) -> "JacobianAccess":
        return cls(jvp=jvp, norm_hint=norm_hint)

    def apply(self, x, v):
        """J(x) @ v through whichever representation is available."""
        if self.jvp is not None:
            return self.jvp(x, v)
        return np.asarray(self.dense(x), dtype=float) @ v


# 2^64 LCG (Knuth MMIX constants); used only to seed power iteration so that
# benchmark runs are bit-reproducible.
_LCG_MULT = 6364136223846793005
_LCG_INC = 1442695040888963407
_LCG_MASK = (1 << 64) - 1


def safe_norm(x) -> float:
    """Euclidean norm that survives |x|^2 overflowing float64."""
    s = float(x @ x)
    if s != math.inf:
        return math.sqrt(s)
    m = float(np.max(np.abs(x)))
    u = x / m
    return m * math.sqrt(float(u @ u))


def lcg_unit_vector(dim: int, seed: int) -> np.ndarray:
    """Deterministic pseudo-random unit vector from a 64-bit LCG."""
    state = (2 * seed + 1) & _LCG_MASK
    vals = np.empty(dim)
    for i in range(dim):
        state = (_LCG_MULT * state + _LCG_INC) & _LCG_MASK
        vals[i] = (state >> 11) / float(1 << 53) - 0.5
    n = math.sqrt(float(vals @ vals))
    if n == 0.0:
        vals[0] = 1.0
        n = 1.0
    return vals / n


def _sym_norm_small(J: np.ndarray) -> float:
    """Largest |eigenvalue| of a symmetric matrix with dim <= 3."""
    n = J.shape[0]
    if n == 1:
        return abs(float(J[0, 0]))
    if n == 2:
        a, b, d = float(J[0, 0]), float(J[0, 1]), float(J[1, 1])
        mid = 0.5 * (a + d)
        rad = math.hypot(0.5 * (a - d), b)
        return max(abs(mid + rad), abs(mid - rad))
    w = np.linalg.eigvalsh(J)
    return float(max(abs(w[0]), abs(w[-1])))


def _gram_norm_small(J: np.ndarray) -> float:
    """Exact sigma_max for a general matrix with dim <= 3, via eigenvalues of
    the (symmetric) Gram matrix J^T J. Power iteration stalls when the top two
    singular values nearly coincide, which these small Jacobians often do."""
    n = J.shape[0]
    if n == 1:
        return abs(float(J[0, 0]))
    if n == 2:
        a, b = float(J[0, 0]), float(J[0, 1])
        c, d = float(J[1, 0]), float(J[1, 1])
        g11 = a * a + c * c
        g12 = a * b + c * d
        g22 = b * b + d * d
        mid = 0.5 * (g11 + g22)
        rad = math.hypot(0.5 * (g11 - g22), g12)
        return math.sqrt(max(mid + rad, 0.0))
    w = np.linalg.eigvalsh(J.T @ J)
    return math.sqrt(max(float(w[-1]), 0.0))


def power_iteration_norm(
    J: np.ndarray,
    seed: int = 1,
    rel_tol: float = 1e-10,
    max_iter: int = 500,
) -> float:
    """2-norm of a dense matrix via power iteration on J^T J.

    A final Rayleigh-Ritz extraction on span{v, Gv} recovers the top
    eigenvalue even when the two leading singular values nearly coincide,
    where the plain iteration stalls.
    """
    J = np.asarray(J, dtype=float)
    dim = J.shape[1]

    def gram(w):
        return J.T @ (J @ w)

    v = lcg_unit_vector(dim, seed)
    lam = 0.0
    for _ in range(max_iter):
        u = gram(v)
        nu = math.sqrt(float(u @ u))
        if nu == 0.0:
            return 0.0
        new_lam = float(v @ u)
        v = u / nu
        if abs(new_lam - lam) <= rel_tol * abs(new_lam):
            lam = new_lam
            break
        lam = new_lam

    gv = gram(v)
    theta = float(v @ gv)
    resid = gv - theta * v
    resid = resid - float(v @ resid) * v
    nr = math.sqrt(float(resid @ resid))
    # below ~1e-8*theta the residual is roundoff and theta is already accurate
    if nr > 1e-8 * max(abs(theta), 1e-300):
        u = resid / nr
        gu = gram(u)
        a, b = theta, float(v @ gu)
        d = float(u @ gu)
        lam = 0.5 * (a + d) + math.hypot(0.5 * (a - d), b)
    else:
        lam = theta
    return math.sqrt(max(lam, 0.0))


def _is_symmetric(J: np.ndarray) -> bool:
    off = float(np.max(np.abs(J - J.T)))
    scale = float(np.max(np.abs(J)))
    return off <= 1e-12 * scale


def spectral_norm(jac: JacobianAccess, x, dim: int | None = None, seed: int = 1) -> float:
    """||J(x)||_2: norm hint, exact small symmetric eigenvalues, or power iteration."""
    if jac.norm_hint is not None:
        return float(jac.norm_hint(x))
    if jac.dense is None:
        raise TransposeUnavailable(
            "matrix-free Jacobian without norm hint: 2-norm needs a transpose "
            "product; use the |b'(x)b(x)|-based step law instead"
        )
    J = np.asarray(jac.dense(x), dtype=float)
    n = J.shape[0]
    if dim is not None and n != dim:
        raise ValueError(f"dense Jacobian is {n}x{J.shape[1]}, expected dim {dim}")
    if n <= 3:
        if _is_symmetric(J):
            return _sym_norm_small(J)
        return _gram_norm_small(J)
    return power_iteration_norm(J, seed=seed)


def jvp_norm(jac: JacobianAccess, x, v) -> float:
    """Euclidean norm |J(x) v|."""
    w = np.asarray(jac.apply(x, v), dtype=float)
    return math.sqrt(float(w @ w))
