"""Uncertainty-wise multi-objective test prioritization under time budgets."""
from . import _backend
from .objectives import PROBLEMS, ProblemDef, evaluate, truncate_to_budget
from .suite import MeasurementTheory, TestCase, TestSuite, ValidationError, derive_um, validate_suite

__version__ = "0.1.0"

__all__ = ["MeasurementTheory", "PROBLEMS", "ProblemDef", "TestCase", "TestSuite",
           "ValidationError", "derive_um", "evaluate", "truncate_to_budget", "validate_suite",
           "_backend"]
