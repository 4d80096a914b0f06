"""Grouped likelihood-equation solver shared by the beta-model and Bradley-Terry fits.

Both models have expected degrees of the form ``E d_i = exp(beta_i) * S_i(beta)``
where ``S_i`` is a row sum over the other nodes. A restriction of the
parameter space is expressed as a *layout*: every coordinate is either frozen
at a known value or belongs to a group whose members share one free value.
For a group ``g`` the aggregated likelihood equation is
``sum_{i in g} d_i = exp(gamma_g) * sum_{i in g} S_i``, which gives the
fixed-point (beta-model) / minorization (BT) update

    gamma_g <- log D_g - log sum_{i in g} S_i(beta).

When that update stalls or contracts slowly, damped Newton steps on the
reduced system finish the job.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import MleNonexistent
from .numerics import Tolerance

log = logging.getLogger(__name__)

DIVERGENCE_BOUND = 30.0
STALL_WINDOW = 50
SLOW_WINDOW = 10
SLOW_RATIO = 0.1  # residual must drop tenfold every SLOW_WINDOW sweeps
MAX_HALVINGS = 40


@dataclass(frozen=True)
class Layout:
    membership: np.ndarray  # group id per coordinate, -1 when frozen
    fixed: np.ndarray  # values of frozen coordinates (0 elsewhere)
    n_groups: int

    @classmethod
    def build(cls, n, tied=(), frozen=None):
        """Singleton groups everywhere except one tied block and frozen coordinates."""
        frozen = dict(frozen or {})
        tied = list(tied)
        tied_set = set(tied)
        membership = np.full(n, -1, dtype=np.int64)
        fixed = np.zeros(n)
        for i, v in frozen.items():
            fixed[i] = v
        g = 0
        for i in range(n):
            if i in frozen:
                continue
            if i in tied_set:
                if i == tied[0]:
                    tied_id = g
                    g += 1
                continue
            membership[i] = g
            g += 1
        if tied:
            membership[np.asarray(tied)] = tied_id
        return cls(membership, fixed, g)

    @property
    def free(self) -> np.ndarray:
        return self.membership >= 0

    def expand(self, gamma):
        beta = self.fixed.copy()
        free = self.free
        beta[free] = gamma[self.membership[free]]
        return beta

    def aggregate(self, vec):
        free = self.free
        return np.bincount(
            self.membership[free], weights=vec[free], minlength=self.n_groups
        )

    def restrict_start(self, start):
        free = self.free
        total = np.bincount(self.membership[free], weights=start[free], minlength=self.n_groups)
        count = np.bincount(self.membership[free], minlength=self.n_groups)
        return total / count

    def reduce_matrix(self, h):
        free = self.free
        hf = h[np.ix_(free, free)]
        if self.n_groups == hf.shape[0]:
            order = self.membership[free]
            if np.array_equal(order, np.arange(self.n_groups)):
                return hf
        p = np.zeros((hf.shape[0], self.n_groups))
        p[np.arange(hf.shape[0]), self.membership[free]] = 1.0
        return p.T @ hf @ p


@dataclass
class SolveResult:
    beta: np.ndarray
    iterations: int
    residual_inf: float
    method: str


def solve(model, layout: Layout, tol: Tolerance, start=None, shift_reference=None):
    """Solve the aggregated likelihood equations of ``model`` on ``layout``.

    ``model`` supplies ``degrees`` (the sufficient statistic), ``terms(beta)``
    returning ``S`` and ``hessian(beta)`` of the negative log-likelihood.
    ``shift_reference``: index of a frozen coordinate that only fixes the
    location (BT); the primary sweep then also updates it and re-centres.
    """
    target = layout.aggregate(model.degrees.astype(float))
    lo, hi = model.group_bounds(layout)
    bad = (target <= lo) | (target >= hi)
    if np.any(bad):
        raise MleNonexistent(
            f"{int(bad.sum())} parameter group(s) sit on the boundary of the "
            "sufficient-statistic range"
        )
    log_target = np.log(target)

    if start is None:
        gamma = np.zeros(layout.n_groups)
    else:
        gamma = layout.restrict_start(np.asarray(start, dtype=float))

    use_newton = False
    best = np.inf
    since_best = 0
    history = []
    method = model.primary_name
    it = 0
    while True:
        beta = layout.expand(gamma)
        if np.max(np.abs(gamma), initial=0.0) > DIVERGENCE_BOUND:
            raise MleNonexistent(
                f"parameters diverged past {DIVERGENCE_BOUND:g} after {it} iterations"
            )
        s = model.terms(beta)
        residual = target - layout.aggregate(np.exp(beta) * s)
        rinf = float(np.max(np.abs(residual), initial=0.0))
        if rinf <= tol.abs_eps:
            beta, rinf = _polish(model, layout, gamma, beta, residual, rinf)
            return SolveResult(beta, it, rinf, method)
        if it >= tol.max_iter:
            raise MleNonexistent(
                f"no convergence within {tol.max_iter} iterations (residual {rinf:.3g})"
            )
        it += 1

        if not use_newton:
            history.append(rinf)
            if rinf < best:
                best, since_best = rinf, 0
            else:
                since_best += 1
            slow = (
                len(history) > 2 * SLOW_WINDOW
                and history[-1] > SLOW_RATIO * history[-1 - SLOW_WINDOW]
            )
            if since_best >= STALL_WINDOW or slow:
                log.debug("switching to Newton after %d sweeps (residual %.3g)", it, rinf)
                use_newton = True
                method += "+newton"

        if use_newton:
            gamma = _newton_step(model, layout, gamma, beta, residual, tol)
        else:
            gamma = log_target - np.log(layout.aggregate(s))
            if shift_reference is not None:
                ref = shift_reference
                new_ref = np.log(model.degrees[ref]) - np.log(s[ref])
                gamma = gamma - (new_ref - layout.fixed[ref])


def _polish(model, layout, gamma, beta, residual, rinf):
    """One undamped Newton step from a converged point.

    Inside the tolerance Newton converges quadratically, so this takes the
    parameter error from the order of the tolerance down to rounding level
    for the price of one factorisation. The step is kept only if it does not
    increase the residual.
    """
    h = layout.reduce_matrix(model.hessian(beta))
    try:
        step = linalg.cho_solve(linalg.cho_factor(h), residual)
    except linalg.LinAlgError:
        return beta, rinf
    b = layout.expand(gamma + step)
    r = layout.aggregate(model.degrees - np.exp(b) * model.terms(b))
    r_new = float(np.max(np.abs(r), initial=0.0))
    if np.all(np.isfinite(b)) and r_new <= rinf:
        return b, r_new
    return beta, rinf


def _newton_step(model, layout, gamma, beta, residual, tol):
    h = layout.reduce_matrix(model.hessian(beta))
    try:
        step = linalg.cho_solve(linalg.cho_factor(h), residual)
    except linalg.LinAlgError:
        try:
            step = np.linalg.solve(h, residual)
        except np.linalg.LinAlgError:
            raise MleNonexistent("singular information matrix in Newton step") from None

    norm0 = float(residual @ residual)
    t = 1.0
    for _ in range(MAX_HALVINGS):
        trial = gamma + t * step
        b = layout.expand(trial)
        r = layout.aggregate(model.degrees - np.exp(b) * model.terms(b))
        if float(r @ r) < norm0:
            return trial
        t *= 0.5
    if np.max(np.abs(step)) <= tol.rel_eps * (1.0 + np.max(np.abs(gamma))):
        raise MleNonexistent("Newton iteration stagnated before reaching tolerance")
    raise MleNonexistent("line search failed to reduce the likelihood-equation residual")
