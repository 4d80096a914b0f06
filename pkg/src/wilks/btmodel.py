"""Bradley-Terry model: likelihood, MLE under a pinned reference, restricted MLEs.

Item i beats item j with ``logit p_ij = beta_i - beta_j``. The location is not
identified, so one reference merit (index 0 by default) is pinned to zero.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from . import _solver
from .errors import DimensionMismatch, InvalidNull, NotStronglyConnected
from .graphdata import ComparisonData, is_strongly_connected
from .numerics import Tolerance
from .params import FitResult, NullHypothesis, ParamVector, as_values

__all__ = [
    "bt_loglik",
    "bt_expected_wins",
    "bt_fisher_and_se",
    "bt_bn_cn",
    "bt_fit_mle",
    "bt_fit_restricted",
]

MODEL = "bt"


def _check_dim(data, b):
    if b.size != data.n:
        raise DimensionMismatch(f"beta has length {b.size}, data has {data.n} items")


def bt_loglik(data: ComparisonData, beta) -> float:
    """sum_i beta_i d_i - sum_{i<j} k_ij log(exp(beta_i) + exp(beta_j))."""
    b = as_values(beta)
    _check_dim(data, b)
    iu, ju = np.triu_indices(data.n, 1)
    pair = np.logaddexp(b[iu], b[ju])
    return float(b @ data.out_wins - (data.k[iu, ju] * pair).sum())


def bt_expected_wins(data: ComparisonData, beta) -> np.ndarray:
    b = as_values(beta)
    _check_dim(data, b)
    p = expit(b[:, None] - b[None, :])
    return (data.k * p).sum(axis=1)


def _info_offdiag(k, b):
    p = expit(b[:, None] - b[None, :])
    v = k * p * (1.0 - p)
    np.fill_diagonal(v, 0.0)
    return v


def bt_fisher_and_se(data: ComparisonData, beta_hat, relative_to_reference=False):
    """Diagonal information v_ii = sum_j k_ij p_ij (1 - p_ij) and standard errors.

    Standard errors are sqrt(1 / v_ii) for every non-reference item. With
    ``relative_to_reference`` the reference's own term is added, i.e.
    sqrt(1 / v_ii + 1 / v_rr), the variance of the contrast with the reference.
    """
    b = as_values(beta_hat)
    _check_dim(data, b)
    ref = getattr(beta_hat, "reference", None)
    ref = 0 if ref is None else ref
    v_diag = _info_offdiag(data.k, b).sum(axis=1)
    var = 1.0 / v_diag
    if relative_to_reference:
        var = var + var[ref]
    se = np.sqrt(np.delete(var, ref))
    return v_diag, se


def bt_bn_cn(beta) -> tuple[float, float]:
    """Max and min over pairs i != j of (1 + e^x)^2 / e^x with x = beta_i - beta_j."""
    b = as_values(beta)
    iu, ju = np.triu_indices(b.size, 1)
    x = np.abs(b[iu] - b[ju])
    return float(2.0 + 2.0 * np.cosh(x.max())), float(2.0 + 2.0 * np.cosh(x.min()))


class _BtSystem:
    primary_name = "mm"

    def __init__(self, data: ComparisonData):
        self.n = data.n
        self.k = data.k.astype(float)
        self.degrees = data.out_wins.astype(float)

    def terms(self, beta):
        # T_i = sum_j k_ij / (exp(beta_i) + exp(beta_j)), so E d_i = exp(beta_i) T_i
        e = np.exp(beta)
        return (self.k / (e[:, None] + e[None, :])).sum(axis=1)

    def hessian(self, beta):
        v = _info_offdiag(self.k, beta)
        h = -v
        np.fill_diagonal(h, v.sum(axis=1))
        return h

    def group_bounds(self, layout):
        free = layout.free
        g = layout.membership[free]
        # a group wins at most every game it plays against outsiders plus its internal games
        same = layout.membership[:, None] == layout.membership[None, :]
        outside = np.where(same, 0.0, self.k).sum(axis=1)
        inside = np.where(same, self.k, 0.0).sum(axis=1) / 2.0
        hi = np.bincount(g, weights=(outside + inside)[free], minlength=layout.n_groups)
        return np.zeros(layout.n_groups), hi


def _prepare(data, reference):
    if not 0 <= reference < data.n:
        raise ValueError(f"reference {reference} out of range for {data.n} items")
    if not data.is_dense():
        raise NotStronglyConnected(
            "every pair of items must be compared at least once (k_ij >= 1)"
        )
    if not is_strongly_connected(data):
        raise NotStronglyConnected(
            "win digraph is not strongly connected; the MLE does not exist"
        )


def _finish(data, res, reference, restricted_to):
    beta = res.beta - res.beta[reference]
    beta_hat = ParamVector(beta, reference)
    b_n, c_n = bt_bn_cn(beta)
    _, se = bt_fisher_and_se(data, beta_hat)
    return FitResult(
        model=MODEL,
        beta_hat=beta_hat,
        loglik=bt_loglik(data, beta),
        iterations=res.iterations,
        converged=True,
        residual_inf=res.residual_inf,
        se=np.insert(se, reference, np.nan),
        b_n=b_n,
        c_n=c_n,
        restricted_to=restricted_to,
        method=res.method,
    )


def bt_fit_mle(
    data: ComparisonData, tol: Tolerance = Tolerance(), reference: int = 0, start=None
) -> FitResult:
    """Unrestricted MLE with ``beta[reference] = 0`` via minorization sweeps.

    Raises NotStronglyConnected when Ford's condition fails.
    """
    _prepare(data, reference)
    layout = _solver.Layout.build(data.n, frozen={reference: 0.0})
    res = _solver.solve(
        _BtSystem(data), layout, tol, start=_pinned_start(start, reference),
        shift_reference=reference,
    )
    return _finish(data, res, reference, None)


def _pinned_start(start, reference):
    if start is None:
        return None
    s = np.asarray(start, dtype=float)
    return s - s[reference]


def bt_fit_restricted(
    data: ComparisonData,
    h0: NullHypothesis,
    tol: Tolerance = Tolerance(),
    reference: int = 0,
    start=None,
) -> FitResult:
    """MLE under a specified or homogeneous null; the reference may not be tested."""
    h0.check(data.n)
    if reference in h0.indices:
        raise InvalidNull(
            "the reference item is pinned to 0 and cannot be part of the null"
        )
    _prepare(data, reference)
    system = _BtSystem(data)
    if h0.is_specified:
        frozen = {reference: 0.0, **dict(zip(h0.indices, h0.values))}
        layout = _solver.Layout.build(data.n, frozen=frozen)
        shift = None
    else:
        layout = _solver.Layout.build(data.n, tied=h0.indices, frozen={reference: 0.0})
        shift = reference
    if layout.n_groups == 0:
        res = _solver.SolveResult(layout.fixed.copy(), 0, 0.0, "none")
    else:
        res = _solver.solve(
            system, layout, tol, start=_pinned_start(start, reference),
            shift_reference=shift,
        )
    return _finish(data, res, reference, h0)
