"""Self-contained statistics engine: tests, regressions, smoothing, bootstrap."""

from .bootstrap import bootstrap_ci
from .hypotests import (
    DegenerateSampleError,
    TestResult,
    contingency_test,
    correlation,
    fligner_k,
    levene_k,
    skewness_z,
    two_sample_test,
    welch_t_summary,
    white_test,
)
from .regression import (
    ConvergenceError,
    RankDeficientError,
    RegressionFit,
    SeparationError,
    fit_linear,
    fit_logistic,
    fit_negbin,
)
from .smoothing import lowess

__all__ = [
    "TestResult",
    "RegressionFit",
    "DegenerateSampleError",
    "RankDeficientError",
    "SeparationError",
    "ConvergenceError",
    "two_sample_test",
    "welch_t_summary",
    "contingency_test",
    "correlation",
    "skewness_z",
    "white_test",
    "levene_k",
    "fligner_k",
    "fit_linear",
    "fit_logistic",
    "fit_negbin",
    "lowess",
    "bootstrap_ci",
]
