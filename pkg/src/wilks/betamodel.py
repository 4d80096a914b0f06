"""The beta-model for undirected graphs: likelihood, information, MLE and restricted MLEs.

Edges occur independently with ``logit P(a_ij = 1) = beta_i + beta_j``; the
degree sequence is sufficient.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.special import expit

from . import _solver
from .errors import DimensionMismatch, MleNonexistent
from .graphdata import UndirectedGraph
from .numerics import Tolerance
from .params import FitResult, NullHypothesis, ParamVector, as_values

__all__ = [
    "beta_loglik",
    "expected_degrees",
    "fisher_info",
    "bn_cn",
    "fit_mle",
    "fit_restricted",
    "standard_errors",
]

MODEL = "beta"


def _pair_sums(b):
    return b[:, None] + b[None, :]


def beta_loglik(g: UndirectedGraph, beta) -> float:
    """sum_i beta_i d_i - sum_{i<j} log(1 + exp(beta_i + beta_j))."""
    b = as_values(beta)
    if b.size != g.n:
        raise DimensionMismatch(f"beta has length {b.size}, graph has {g.n} nodes")
    iu, ju = np.triu_indices(g.n, 1)
    return float(b @ g.degrees - np.logaddexp(0.0, b[iu] + b[ju]).sum())


def expected_degrees(beta) -> np.ndarray:
    b = as_values(beta)
    p = expit(_pair_sums(b))
    np.fill_diagonal(p, 0.0)
    return p.sum(axis=1)


def fisher_info(beta) -> np.ndarray:
    """Information matrix V: v_ij = sigmoid'(beta_i + beta_j), v_ii = sum_{j != i} v_ij."""
    b = as_values(beta)
    p = expit(_pair_sums(b))
    v = p * (1.0 - p)
    np.fill_diagonal(v, 0.0)
    np.fill_diagonal(v, v.sum(axis=1))
    return v


def bn_cn(beta) -> tuple[float, float]:
    """Max and min over pairs i != j of (1 + e^x)^2 / e^x with x = beta_i + beta_j."""
    b = as_values(beta)
    if b.size < 2:
        raise ValueError("need at least two parameters")
    iu, ju = np.triu_indices(b.size, 1)
    x = np.abs(b[iu] + b[ju])
    # (1 + e^x)^2 / e^x = 2 + 2 cosh(x)
    return float(2.0 + 2.0 * np.cosh(x.max())), float(2.0 + 2.0 * np.cosh(x.min()))


def standard_errors(beta_hat) -> np.ndarray:
    b = as_values(beta_hat)
    p = expit(_pair_sums(b))
    v = p * (1.0 - p)
    np.fill_diagonal(v, 0.0)
    return 1.0 / np.sqrt(v.sum(axis=1))


class _BetaSystem:
    primary_name = "fixed-point"

    def __init__(self, g: UndirectedGraph):
        self.n = g.n
        self.degrees = g.degrees.astype(float)

    def terms(self, beta):
        # S_i = sum_{j != i} 1 / (exp(-beta_j) + exp(beta_i)), so E d_i = exp(beta_i) S_i
        m = 1.0 / (np.exp(beta)[:, None] + np.exp(-beta)[None, :])
        np.fill_diagonal(m, 0.0)
        return m.sum(axis=1)

    def hessian(self, beta):
        return fisher_info(beta)

    def group_bounds(self, layout):
        size = np.bincount(layout.membership[layout.free], minlength=layout.n_groups)
        return np.zeros(layout.n_groups), size * (self.n - 1.0)


def _check_interior(g: UndirectedGraph, layout) -> None:
    """Raise MleNonexistent unless the group degree totals are interior points.

    The convex hull of degree sequences is cut out by
    ``sum_S d - sum_T d <= |S| (n - 1 - |T|)`` over disjoint node sets S, T.
    An (aggregated) MLE exists exactly when every such inequality that the
    free groups can express is strict. Tied groups must enter S or T whole
    and frozen nodes in neither; for singletons the binding choice is always
    the largest degrees in S and the smallest in T, so an O(n^2) sweep
    suffices.
    """
    n = g.n
    d = g.degrees.astype(np.int64)
    member = layout.membership
    sizes = np.bincount(member[member >= 0], minlength=layout.n_groups)
    totals = np.bincount(member[member >= 0], weights=d[member >= 0], minlength=layout.n_groups)
    totals = np.rint(totals).astype(np.int64)
    single = np.sort(totals[sizes == 1])[::-1]
    f = single.size
    top = np.concatenate([[0], np.cumsum(single)])
    bottom = np.concatenate([[0], np.cumsum(single[::-1])])
    s1 = np.arange(f + 1)[:, None]
    q1 = np.arange(f + 1)[None, :]
    feasible = s1 + q1 <= f

    blocks = [(int(sizes[k]), int(totals[k])) for k in np.flatnonzero(sizes > 1)]
    for signs in itertools.product((1, 0, -1), repeat=len(blocks)):
        s_b = sum(m for (m, _), sg in zip(blocks, signs) if sg > 0)
        q_b = sum(m for (m, _), sg in zip(blocks, signs) if sg < 0)
        net = sum(sg * t for (_, t), sg in zip(blocks, signs))
        s, q = s_b + s1, q_b + q1
        slack = s * (n - 1 - q) - (net + top[s1] - bottom[q1])
        hit = feasible & (slack <= 0) & ((s > 0) | (q > 0))
        if np.any(hit):
            raise MleNonexistent(
                "degree sequence lies on the boundary of its convex support; "
                "the likelihood has no maximiser"
            )


def _finish(g, res, restricted_to):
    beta_hat = ParamVector(res.beta)
    b_n, c_n = bn_cn(res.beta)
    return FitResult(
        model=MODEL,
        beta_hat=beta_hat,
        loglik=beta_loglik(g, res.beta),
        iterations=res.iterations,
        converged=True,
        residual_inf=res.residual_inf,
        se=standard_errors(res.beta),
        b_n=b_n,
        c_n=c_n,
        restricted_to=restricted_to,
        method=res.method,
    )


def fit_mle(g: UndirectedGraph, tol: Tolerance = Tolerance(), start=None) -> FitResult:
    """Unrestricted MLE via the fixed-point map, with a Newton fallback.

    Raises MleNonexistent when the degree sequence is not an interior point
    of its convex support (checked exactly before iterating), and
    defensively on divergence of the iterates or exhaustion of ``tol.max_iter``.
    """
    layout = _solver.Layout.build(g.n)
    _check_interior(g, layout)
    res = _solver.solve(_BetaSystem(g), layout, tol, start=start)
    return _finish(g, res, None)


def fit_restricted(
    g: UndirectedGraph, h0: NullHypothesis, tol: Tolerance = Tolerance(), start=None
) -> FitResult:
    """MLE over the null space: frozen coordinates or one tied block."""
    h0.check(g.n)
    if h0.is_specified:
        layout = _solver.Layout.build(g.n, frozen=dict(zip(h0.indices, h0.values)))
    else:
        layout = _solver.Layout.build(g.n, tied=h0.indices)
    if layout.n_groups == 0:
        # simple null: nothing left to estimate
        beta = layout.fixed.copy()
        res = _solver.SolveResult(beta, 0, 0.0, "none")
        return _finish(g, res, h0)
    _check_interior(g, layout)
    res = _solver.solve(_BetaSystem(g), layout, tol, start=start)
    return _finish(g, res, h0)
