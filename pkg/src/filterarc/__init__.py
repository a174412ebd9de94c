"""Line-search filter adaptive-cubic-regularization solver for equality-constrained problems."""

from .config import ConfigError, SolverConfig
from .driver import SolverReport, solve
from .filter import Filter
from .problem import EvalCounters, EvaluationError, ProblemDef, check_derivatives
from .testlib import get_problem, problem_names, reference_stats

__all__ = [
    "ConfigError",
    "EvalCounters",
    "EvaluationError",
    "Filter",
    "ProblemDef",
    "SolverConfig",
    "SolverReport",
    "check_derivatives",
    "get_problem",
    "problem_names",
    "reference_stats",
    "solve",
]

__version__ = "0.1.0"
