"""Adaptive sparse estimation for linear models with two-way interactions.

Heredity-constrained model enumeration, projection fits, the ABC selection
criterion, minimax-rate shapes and desk-scale checks of the supporting
combinatorics.
"""

from .core import (
    CoefficientVector,
    DomainError,
    Heredity,
    ModelIndex,
    SparsityBudget,
    count_models,
    eligible_interaction_count,
    enumerate_models,
    is_admissible,
)
from .criterion import ComplexityConfig, ComplexityTable, Family, abc, complexity, kraft_check
from .fit import FitResult, loss, project
from .rates import classify_scenario, improvement_ratios, minimax_rate, minimax_rate_quadratic, xi
from .search import SelectionResult, select_exhaustive, select_stochastic
from .spectral import Dataset, DesignView, materialize_columns, src_check, src_failure_witness

__version__ = "0.1.0"
