"""Special functions and small linear-algebra kernels.

Tail probabilities are thin wrappers over well-tested library routines;
the tridiagonal solver is a plain Thomas sweep that reports the pivots it
meets so that indefinite input is caught rather than silently solved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .errors import SingularMatrix

__all__ = [
    "Tolerance",
    "TridiagonalMatrix",
    "chi_square_sf",
    "chi_square_quantile",
    "normal_sf",
    "normal_quantile",
    "tridiag_solve",
]

PIVOT_EPS = 1e-14


@dataclass(frozen=True)
class Tolerance:
    """Stopping rule for the iterative solvers.

    ``abs_eps`` bounds the sup-norm of the likelihood-equation residual at
    convergence. ``rel_eps`` is the relative step size below which a Newton
    iteration is considered stagnant.
    """

    abs_eps: float = 1e-8
    rel_eps: float = 1e-10
    max_iter: int = 5000

    def __post_init__(self):
        if not (self.abs_eps > 0 and self.rel_eps > 0):
            raise ValueError("tolerances must be positive")
        if int(self.max_iter) < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal."""

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float).ravel()
        off = np.asarray(self.off, dtype=float).ravel()
        if diag.size < 1:
            raise ValueError("tridiagonal matrix needs at least one row")
        if off.size != diag.size - 1:
            raise ValueError(
                f"off-diagonal has length {off.size}, expected {diag.size - 1}"
            )
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "off", off)

    @property
    def dim(self) -> int:
        return self.diag.size

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        y[:-1] += self.off * x[1:]
        y[1:] += self.off * x[:-1]
        return y

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


def _clamp(p: float) -> float:
    return min(1.0, max(0.0, float(p)))


def chi_square_sf(x: float, df: int) -> float:
    """Upper tail P(X > x) of a chi-square variable with ``df`` degrees of freedom."""
    if df < 1 or int(df) != df:
        raise ValueError(f"df must be a positive integer, got {df!r}")
    if not x >= 0:
        raise ValueError(f"x must be non-negative, got {x!r}")
    if x == 0:
        return 1.0
    return _clamp(special.gammaincc(0.5 * df, 0.5 * x))


def chi_square_quantile(p: float, df: int) -> float:
    """Return q with P(X <= q) = p, found by bracketing on :func:`chi_square_sf`."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    target = 1.0 - p
    hi = max(1.0, 2.0 * df)
    while chi_square_sf(hi, df) > target:
        hi *= 2.0
    return optimize.brentq(
        lambda q: chi_square_sf(q, df) - target, 0.0, hi, xtol=1e-12, rtol=1e-14
    )


def normal_sf(z: float) -> float:
    """Standard normal upper tail 1 - Phi(z)."""
    if not math.isfinite(z):
        raise ValueError("z must be finite")
    return _clamp(0.5 * math.erfc(z / math.sqrt(2.0)))


def normal_quantile(p: float) -> float:
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    return float(special.ndtri(p))


def tridiag_solve(m: TridiagonalMatrix, rhs) -> np.ndarray:
    """Solve ``m @ x = rhs`` for symmetric positive definite tridiagonal ``m``.

    Raises SingularMatrix when a pivot of the forward sweep is not clearly
    positive, which also rejects indefinite matrices.
    """
    b = np.asarray(rhs, dtype=float).ravel()
    n = m.dim
    if b.size != n:
        raise ValueError(f"rhs has length {b.size}, expected {n}")

    c = np.empty(max(n - 1, 0))
    d = np.empty(n)
    pivot = m.diag[0]
    if pivot <= PIVOT_EPS:
        raise SingularMatrix(f"non-positive pivot {pivot:g} at row 0")
    d[0] = b[0] / pivot
    for k in range(1, n):
        c[k - 1] = m.off[k - 1] / pivot
        pivot = m.diag[k] - m.off[k - 1] * c[k - 1]
        if pivot <= PIVOT_EPS:
            raise SingularMatrix(f"non-positive pivot {pivot:g} at row {k}")
        d[k] = (b[k] - m.off[k - 1] * d[k - 1]) / pivot

    x = d
    for k in range(n - 2, -1, -1):
        x[k] -= c[k] * x[k + 1]
    return x
