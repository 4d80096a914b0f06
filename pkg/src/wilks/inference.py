"""Likelihood-ratio and Wald tests with chi-square or normalized-normal calibration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import betamodel, btmodel
from .errors import InvalidNull, NegativeLrt, NoChiSquareApprox
from .numerics import (
    Tolerance,
    TridiagonalMatrix,
    chi_square_sf,
    normal_sf,
    tridiag_solve,
)
from .params import FitResult, NullHypothesis

__all__ = [
    "TestResult",
    "lrt_statistic",
    "degrees_of_freedom",
    "normalizing_r",
    "fit_full",
    "fit_null",
    "run_lrt",
    "wald_test",
    "wald_statistic",
]

MODELS = ("beta", "bt")
REGIMES = ("chi2", "normal", "auto")
AUTO_CHI2_MAX_R = 30
LRT_SLACK = 1e-9


@dataclass(frozen=True)
class TestResult:
    model: str
    null: NullHypothesis
    lrt_stat: float
    regime: str
    p_value: float
    df: Optional[int] = None
    z: Optional[float] = None
    r: Optional[int] = None
    wald_stat: Optional[float] = None
    wald_p: Optional[float] = None
    warnings: tuple = field(default=())

    __test__ = False  # keep pytest from collecting this class

    @property
    def z_or_stat(self) -> float:
        return self.z if self.regime == "normal" else self.lrt_stat

    def to_json_dict(self) -> dict:
        out = {
            "model": self.model,
            "null": self.null.to_json_dict(),
            "lrt_stat": self.lrt_stat,
            "regime": self.regime,
        }
        if self.df is not None:
            out["df"] = self.df
        if self.z is not None:
            out["z"] = self.z
            out["r"] = self.r
        out["p_value"] = self.p_value
        if self.wald_stat is not None:
            out["wald"] = {"stat": self.wald_stat, "p": self.wald_p}
        out["warnings"] = list(self.warnings)
        return out


def _check_model(model):
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")


def lrt_statistic(loglik_full: float, loglik_restricted: float) -> float:
    """Twice the log-likelihood gap, with rounding-level negatives clamped to 0."""
    if not (math.isfinite(loglik_full) and math.isfinite(loglik_restricted)):
        raise ValueError("log-likelihoods must be finite")
    gap = loglik_full - loglik_restricted
    if gap < -LRT_SLACK:
        raise NegativeLrt(
            f"restricted log-likelihood exceeds the full one by {-gap:.3g}; "
            "the restricted fit probably failed"
        )
    return max(0.0, 2.0 * gap)


def degrees_of_freedom(model: str, null: NullHypothesis) -> int:
    """Fixed-dimension chi-square degrees of freedom for ``null``.

    beta-model: r for a specified null, r - 1 for a homogeneous one.
    BT: (tied non-reference items) - 1 for a homogeneous null; a specified
    null has no chi-square limit and raises NoChiSquareApprox.
    """
    _check_model(model)
    if model == "bt" and null.is_specified:
        raise NoChiSquareApprox(
            "the Bradley-Terry LRT for a fixed-dimension specified null has no "
            "chi-square limit; use the normal regime for large r"
        )
    df = null.r if null.is_specified else null.r - 1
    if df < 1:
        raise InvalidNull(f"null implies {df} degrees of freedom")
    return df


def normalizing_r(model: str, null: NullHypothesis) -> int:
    """The r in (2 * gap - r) / sqrt(2 r).

    For BT the tested items are indexed 2..r next to the pinned reference, so
    r is one more than the number of tested items.
    """
    _check_model(model)
    return null.r + 1 if model == "bt" else null.r


def fit_full(model, data, tol=Tolerance(), reference=0) -> FitResult:
    _check_model(model)
    if model == "beta":
        return betamodel.fit_mle(data, tol)
    return btmodel.bt_fit_mle(data, tol, reference=reference)


def fit_null(model, data, null, tol=Tolerance(), reference=0, start=None) -> FitResult:
    _check_model(model)
    if model == "beta":
        return betamodel.fit_restricted(data, null, tol, start=start)
    return btmodel.bt_fit_restricted(data, null, tol, reference=reference, start=start)


def _warm_start(null, full):
    """Full-fit estimates with the null imposed; a good start for the restricted fit."""
    start = full.beta.copy()
    idx = list(null.indices)
    if null.is_specified:
        start[idx] = null.values
    else:
        start[idx] = start[idx].mean()
    return start


def run_lrt(
    model: str,
    data,
    null: NullHypothesis,
    regime: str = "auto",
    tol: Tolerance = Tolerance(),
    wald: bool = False,
    reference: int = 0,
    full_fit: Optional[FitResult] = None,
) -> TestResult:
    """Fit under the full and null spaces and calibrate 2 * (l_full - l_null)."""
    _check_model(model)
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")
    warnings = []

    try:
        df = degrees_of_freedom(model, null)
    except NoChiSquareApprox:
        if regime == "chi2":
            raise
        df = None

    if regime == "auto":
        regime = "chi2" if df is not None and null.r <= AUTO_CHI2_MAX_R else "normal"
        if df is None and null.r <= AUTO_CHI2_MAX_R:
            warnings.append(
                "no chi-square limit for this null; normal calibration assumes "
                f"a large tested set but r = {null.r}"
            )

    full = full_fit if full_fit is not None else fit_full(model, data, tol, reference)
    restricted = fit_null(model, data, null, tol, reference, start=_warm_start(null, full))
    stat = lrt_statistic(full.loglik, restricted.loglik)

    if regime == "chi2":
        result = dict(regime="chi2", df=df, p_value=chi_square_sf(stat, df))
    else:
        r = normalizing_r(model, null)
        z = (stat - r) / math.sqrt(2.0 * r)
        result = dict(regime="normal", z=z, r=r, p_value=normal_sf(z))

    wald_stat = wald_p = None
    if wald:
        if null.is_specified:
            raise ValueError("the Wald test is implemented for homogeneous nulls only")
        wald_stat, wald_p = wald_test(model, data, null.indices, tol, fit=full)

    return TestResult(
        model=model,
        null=null,
        lrt_stat=stat,
        wald_stat=wald_stat,
        wald_p=wald_p,
        warnings=tuple(warnings),
        **result,
    )


def wald_statistic(beta_hat, v_diag, block) -> float:
    """nu' Omega^{-1} nu for consecutive differences nu over ``block``.

    Omega is the S-approximation covariance of the differences: tridiagonal
    with 1/v_kk + 1/v_{k+1,k+1} on the diagonal and -1/v_{k+1,k+1} beside it.
    """
    block = np.asarray(block)
    b = np.asarray(beta_hat, dtype=float)[block]
    inv_v = 1.0 / np.asarray(v_diag, dtype=float)[block]
    nu = b[:-1] - b[1:]
    omega = TridiagonalMatrix(inv_v[:-1] + inv_v[1:], -inv_v[1:-1])
    return float(max(0.0, nu @ tridiag_solve(omega, nu)))


def wald_test(
    model: str,
    data,
    block_indices,
    tol: Tolerance = Tolerance(),
    fit: Optional[FitResult] = None,
    reference: int = 0,
) -> tuple[float, float]:
    """Wald test of equal parameters over ``block_indices``, chi-square on r - 1 df."""
    _check_model(model)
    block = sorted(int(i) for i in block_indices)
    if len(block) < 2 or len(set(block)) != len(block):
        raise InvalidNull("the Wald block needs at least two distinct indices")
    if fit is None:
        fit = fit_full(model, data, tol, reference)
    if model == "bt":
        if fit.reference in block:
            raise InvalidNull("the BT reference item cannot be part of the Wald block")
        v_diag, _ = btmodel.bt_fisher_and_se(data, fit.beta_hat)
    else:
        v_diag = np.diag(betamodel.fisher_info(fit.beta))
    stat = wald_statistic(fit.beta, v_diag, block)
    return stat, chi_square_sf(stat, len(block) - 1)
