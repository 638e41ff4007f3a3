"""Binary logit regression with an econometric diagnostic report."""

from .core import CoefficientVector, inverse_logit, log_likelihood, logit
from .data import (
    DataError,
    Dataset,
    DescriptiveStats,
    FrequencyTable,
    Role,
    VariableSpec,
    describe,
    load_csv,
    screen_by_cv,
    tabulate,
)
from .diagnostics import association, deviance_gof, hosmer_lemeshow, pearson_gof
from .estimator import FitConfig, FitError, FitResult, LogitRegression, fit
from .inference import g_test, odds_ratio, wald_test
from .report import ReportDocument, build_report
from .selection import CVScreen

__all__ = [
    "CVScreen", "CoefficientVector", "DataError", "Dataset", "DescriptiveStats",
    "FitConfig", "FitError", "FitResult", "FrequencyTable", "LogitRegression",
    "ReportDocument", "Role", "VariableSpec", "association", "build_report",
    "describe", "deviance_gof", "fit", "g_test", "hosmer_lemeshow", "inverse_logit",
    "load_csv", "log_likelihood", "logit", "odds_ratio", "pearson_gof",
    "screen_by_cv", "tabulate", "wald_test",
]

__version__ = "0.1.0"
