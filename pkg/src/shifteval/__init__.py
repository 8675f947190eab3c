"""Evaluate decision-making agents under test-time distribution shift.

Two complementary analyses over seed-averaged episode returns:

* causal impact of an experimenter-controlled shift, via
  difference-in-differences against a fixed-seed control run
  (:mod:`shifteval.impact`);
* damped-trend forecasts with prediction intervals for shifts that occur
  at random (:mod:`shifteval.forecast`).

:mod:`shifteval.harness` generates data from deterministic toy
environments and :mod:`shifteval.protocol` runs the whole evaluation.
"""
from .kernels import BACKEND
from .series import (
    EqualityReport,
    MeanSeries,
    PerformanceMatrix,
    ValidationError,
    aggregate_mean,
    check_pre_treatment_equality,
    read_csv,
    rolling_mean,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "EqualityReport",
    "MeanSeries",
    "PerformanceMatrix",
    "ValidationError",
    "aggregate_mean",
    "check_pre_treatment_equality",
    "read_csv",
    "rolling_mean",
    "write_csv",
    "__version__",
]
