"""Seeded replication harness for Type-I error, power and QQ studies.

Replicate ``i`` of a scenario draws its data from
``numpy.random.default_rng([master_seed, i])``, so results do not depend on
how replicates are spread over worker processes.
"""

from __future__ import annotations

import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from . import betamodel
from .errors import InvalidScenario, MleNonexistent
from .graphdata import UndirectedGraph, simulate_beta_graph, simulate_bt_data
from .inference import fit_full, run_lrt, wald_test
from .numerics import Tolerance, chi_square_quantile, normal_quantile
from .params import NullHypothesis, as_values

__all__ = [
    "SimScenario",
    "SimReport",
    "build_truth",
    "scenario_null",
    "run_type1",
    "run_power",
    "qq_table",
    "qq_export",
    "quadratic_degree_stat",
    "resolve_workers",
]

log = logging.getLogger(__name__)

SCHEDULES = ("H01", "H02", "H03", "H04", "power")
DEFAULT_R = {"H03": 5, "H04": 10, "power": 5}


@dataclass(frozen=True)
class SimScenario:
    """One cell of a simulation table.

    ``r`` counts tested parameters as indexed in the model: for BT the
    reference (index 0) is inside the range 1..r but is never tested, so a
    BT scenario with r = 10 tests items 2..10.
    """

    model: str = "beta"
    schedule: str = "H04"
    n: int = 200
    ln_factor: float = 0.0
    r: Optional[int] = None
    c: float = 0.0
    k_common: int = 1
    reps: int = 1000
    alpha_levels: tuple = (0.05, 0.10)
    master_seed: int = 0
    regime: str = "auto"
    null_values: Optional[tuple] = None

    def __post_init__(self):
        if self.model not in ("beta", "bt"):
            raise InvalidScenario(f"unknown model {self.model!r}")
        if self.schedule not in SCHEDULES:
            raise InvalidScenario(f"unknown schedule {self.schedule!r}")
        if self.n < 3:
            raise InvalidScenario("n must be at least 3")
        if self.reps < 1:
            raise InvalidScenario("reps must be at least 1")
        if self.k_common < 1:
            raise InvalidScenario("k_common must be at least 1")
        if not self.alpha_levels or not all(0 < a < 1 for a in self.alpha_levels):
            raise InvalidScenario("alpha levels must lie in (0, 1)")
        object.__setattr__(self, "alpha_levels", tuple(sorted(self.alpha_levels)))
        r = self.r
        if r is None:
            r = {"H01": self.n, "H02": self.n // 2}.get(self.schedule) or DEFAULT_R[self.schedule]
        if self.schedule == "H01" and r != self.n:
            raise InvalidScenario("H01 is the simple null: r must equal n")
        low = 3 if (self.model == "bt" and self.schedule in ("H02", "H04", "power")) else 2
        if self.schedule in ("H01", "H03") and self.model == "beta":
            low = 1
        if not low <= r <= self.n:
            raise InvalidScenario(f"r = {r} outside [{low}, {self.n}] for this scenario")
        object.__setattr__(self, "r", int(r))
        if self.null_values is not None:
            if self.schedule != "H03":
                raise InvalidScenario("null_values only apply to H03")
            vals = tuple(float(v) for v in self.null_values)
            if len(vals) != len(self.tested_indices):
                raise InvalidScenario(
                    f"H03 needs {len(self.tested_indices)} null values, got {len(vals)}"
                )
            object.__setattr__(self, "null_values", vals)

    @property
    def tested_indices(self) -> tuple:
        start = 1 if self.model == "bt" else 0
        return tuple(range(start, self.r))

    @property
    def is_null(self) -> bool:
        return self.schedule != "power" or self.c == 0


def build_truth(scenario: SimScenario) -> np.ndarray:
    """True parameter vector for a scenario (0-based positions, 1-based formulas)."""
    n, r = scenario.n, scenario.r
    i = np.arange(1, n + 1, dtype=float)
    if scenario.schedule == "power":
        if r < 2:
            raise InvalidScenario("power schedule needs r >= 2")
        return np.where(
            i <= r, (i - 1) * scenario.c / (r - 1), 0.2 * (i - r) * math.log(n) / n
        )
    ln = scenario.ln_factor * math.log(n)
    beta = (i - 1) * ln / (n - 1)
    if scenario.schedule in ("H02", "H04"):
        beta[:r] = 0.0
    elif scenario.schedule == "H03":
        beta[:r] = 0.0
        if scenario.null_values is not None:
            beta[list(scenario.tested_indices)] = scenario.null_values
    return beta


def scenario_null(scenario: SimScenario, truth=None) -> NullHypothesis:
    idx = scenario.tested_indices
    if scenario.schedule in ("H01", "H03"):
        truth = build_truth(scenario) if truth is None else truth
        return NullHypothesis.specified(idx, np.asarray(truth)[list(idx)])
    return NullHypothesis.homogeneous(idx)


@dataclass
class SimReport:
    scenario: SimScenario
    rejection_rates: dict
    nonexistence_rate: float
    statistics: np.ndarray  # 2 * log-likelihood gap per usable replicate
    z: np.ndarray  # normalized statistics (stat - r) / sqrt(2 r)
    p_values: np.ndarray
    regime: str
    df: Optional[int]
    r_norm: int
    wald_rates: Optional[dict] = None
    wald_p_values: Optional[np.ndarray] = None
    warnings: tuple = field(default=())

    @property
    def reps_effective(self) -> int:
        return int(self.statistics.size)

    @property
    def mean_stat(self) -> float:
        return float(np.mean(self.statistics)) if self.statistics.size else math.nan

    @property
    def var_stat(self) -> float:
        return float(np.var(self.statistics, ddof=1)) if self.statistics.size > 1 else math.nan

    @property
    def ks_distance_normal(self) -> Optional[float]:
        if self.regime != "normal" or self.z.size == 0:
            return None
        return float(stats.kstest(self.z, "norm").statistic)

    def to_csv(self) -> str:
        s = self.scenario
        cols = [
            "model", "schedule", "n", "ln_factor", "r", "c", "k", "reps", "seed",
            "regime", "alpha", "rate",
        ]
        if self.wald_rates is not None:
            cols.append("wald_rate")
        cols += ["nonexistence", "reps_effective"]
        buf = io.StringIO()
        buf.write(",".join(cols) + "\n")
        for a in s.alpha_levels:
            row = [
                s.model, s.schedule, s.n, repr(s.ln_factor), s.r, repr(s.c), s.k_common,
                s.reps, s.master_seed, self.regime, repr(a), repr(self.rejection_rates[a]),
            ]
            if self.wald_rates is not None:
                row.append(repr(self.wald_rates[a]))
            row += [repr(self.nonexistence_rate), self.reps_effective]
            buf.write(",".join(str(x) for x in row) + "\n")
        return buf.getvalue()

    def summary(self) -> str:
        s = self.scenario
        rates = " ".join(f"alpha={a:g}:{self.rejection_rates[a]:.4f}" for a in s.alpha_levels)
        text = f"{s.model} {s.schedule} n={s.n} r={s.r} reps={s.reps} {rates}"
        if self.wald_rates is not None:
            text += " wald " + " ".join(
                f"alpha={a:g}:{self.wald_rates[a]:.4f}" for a in s.alpha_levels
            )
        return text + f" nonexistence={self.nonexistence_rate:.4f}"


def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker count: explicit value, else CPU count, capped by WILKS_THREADS."""
    if workers is None:
        workers = os.cpu_count() or 1
    cap = os.environ.get("WILKS_THREADS")
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            log.warning("ignoring non-integer WILKS_THREADS=%r", cap)
    return max(1, int(workers))


def _simulate(scenario, truth, rng):
    if scenario.model == "beta":
        return simulate_beta_graph(truth, rng)
    return simulate_bt_data(truth, scenario.k_common, rng)


def _replicate(scenario, truth, null, index, with_wald, tol):
    rng = np.random.default_rng([scenario.master_seed, index])
    data = _simulate(scenario, truth, rng)
    try:
        full = fit_full(scenario.model, data, tol)
        res = run_lrt(scenario.model, data, null, scenario.regime, tol, full_fit=full)
        wald_p = wald_test(scenario.model, data, null.indices, tol, fit=full)[1] if with_wald else math.nan
    except MleNonexistent:
        return None
    z = res.z if res.z is not None else math.nan
    return res.lrt_stat, z, res.p_value, wald_p, res.regime, res.df, res.warnings


def _run_block(args):
    scenario, truth, null, indices, with_wald, tol = args
    return [_replicate(scenario, truth, null, i, with_wald, tol) for i in indices]


def _run(scenario, with_wald, workers, tol):
    truth = build_truth(scenario)
    null = scenario_null(scenario, truth)
    workers = resolve_workers(workers)
    indices = list(range(scenario.reps))
    if workers == 1 or scenario.reps < 2:
        outcomes = _run_block((scenario, truth, null, indices, with_wald, tol))
    else:
        n_blocks = min(scenario.reps, 4 * workers)
        blocks = [indices[b::n_blocks] for b in range(n_blocks)]
        outcomes = [None] * scenario.reps
        with ProcessPoolExecutor(max_workers=workers) as pool:
            jobs = [(scenario, truth, null, blk, with_wald, tol) for blk in blocks]
            for blk, out in zip(blocks, pool.map(_run_block, jobs)):
                for i, o in zip(blk, out):
                    outcomes[i] = o

    good = [o for o in outcomes if o is not None]
    stat = np.array([o[0] for o in good])
    z = np.array([o[1] for o in good])
    p = np.array([o[2] for o in good])
    wp = np.array([o[3] for o in good])
    regime = good[0][4] if good else scenario.regime
    df = good[0][5] if good else None
    warnings = good[0][6] if good else ()
    r_norm = null.r + 1 if scenario.model == "bt" else null.r

    def rates(pv):
        if pv.size == 0:
            return {a: math.nan for a in scenario.alpha_levels}
        return {a: float(np.mean(pv < a)) for a in scenario.alpha_levels}

    if regime == "chi2":
        z = (stat - r_norm) / math.sqrt(2.0 * r_norm)
    return SimReport(
        scenario=scenario,
        rejection_rates=rates(p),
        nonexistence_rate=1.0 - len(good) / scenario.reps,
        statistics=stat,
        z=z,
        p_values=p,
        regime=regime,
        df=df,
        r_norm=r_norm,
        wald_rates=rates(wp) if with_wald else None,
        wald_p_values=wp if with_wald else None,
        warnings=warnings,
    )


def run_type1(scenario: SimScenario, workers=None, tol: Tolerance = Tolerance()) -> SimReport:
    """Rejection rates when the data are generated under the null.

    Replicates where either fit does not exist are dropped from the rate
    denominators and reported through ``nonexistence_rate``.
    """
    if not scenario.is_null:
        raise InvalidScenario("run_type1 needs a null scenario (power schedule with c = 0 only)")
    return _run(scenario, False, workers, tol)


def run_power(scenario: SimScenario, workers=None, tol: Tolerance = Tolerance()) -> SimReport:
    """LRT and Wald rejection rates for the power schedule (homogeneous null)."""
    if scenario.schedule != "power":
        raise InvalidScenario("run_power needs the power schedule")
    return _run(scenario, True, workers, tol)


def qq_table(z, r: int) -> np.ndarray:
    """Rows (empirical, normal quantile, normalized chi-square quantile), sorted.

    Plotting positions are (i - 0.5) / m; the chi-square column is
    ((chi2_r quantile) - r) / sqrt(2 r).
    """
    emp = np.sort(np.asarray(z, dtype=float))
    m = emp.size
    probs = (np.arange(1, m + 1) - 0.5) / m
    normal_q = np.array([normal_quantile(p) for p in probs])
    chi2_q = np.array([(chi_square_quantile(p, r) - r) / math.sqrt(2.0 * r) for p in probs])
    return np.column_stack([emp, normal_q, chi2_q])


def qq_to_csv(table) -> str:
    lines = ["empirical,normal_q,chi2_q"]
    lines += [",".join(repr(float(x)) for x in row) for row in table]
    return "\n".join(lines) + "\n"


def qq_export(scenario: SimScenario, workers=None, tol: Tolerance = Tolerance()):
    """Run the null scenario and return (QQ table, report)."""
    report = run_type1(scenario, workers, tol)
    r = report.r_norm if report.regime == "normal" else report.df
    z = report.z if report.regime == "normal" else (report.statistics - r) / math.sqrt(2.0 * r)
    return qq_table(z, r), report


def quadratic_degree_stat(g: UndirectedGraph, beta_true, r: int) -> float:
    """sum_{i < r} (d_i - E d_i)^2 / v_ii with moments taken at the true parameters."""
    b = as_values(beta_true)
    if r == 0:
        return 0.0
    if not 0 <= r <= g.n:
        raise ValueError(f"r must lie in [0, {g.n}]")
    ed = betamodel.expected_degrees(b)[:r]
    v = np.diag(betamodel.fisher_info(b))[:r]
    dev = g.degrees[:r] - ed
    return float(np.sum(dev * dev / v))

