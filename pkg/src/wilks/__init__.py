"""Likelihood-ratio and Wald tests for the beta-model and the Bradley-Terry model."""

from .betamodel import beta_loglik, bn_cn, fisher_info, fit_mle, fit_restricted, standard_errors
from .btmodel import bt_fisher_and_se, bt_fit_mle, bt_fit_restricted, bt_loglik
from .errors import (
    DimensionMismatch,
    InvalidNull,
    InvalidScenario,
    MleNonexistent,
    NegativeLrt,
    NoChiSquareApprox,
    NotStronglyConnected,
    ParseError,
    SingularMatrix,
    WilksError,
)
from .graphdata import (
    ComparisonData,
    UndirectedGraph,
    is_strongly_connected,
    read_comparisons,
    read_edge_list,
    simulate_beta_graph,
    simulate_bt_data,
    write_comparisons,
    write_edge_list,
)
from .inference import TestResult, degrees_of_freedom, lrt_statistic, run_lrt, wald_test
from .montecarlo import (
    SimReport,
    SimScenario,
    build_truth,
    qq_export,
    qq_table,
    qq_to_csv,
    quadratic_degree_stat,
    run_power,
    run_type1,
)
from .numerics import Tolerance, chi_square_sf, normal_sf, tridiag_solve
from .params import FitResult, NullHypothesis, ParamVector

__version__ = "0.1.0"
