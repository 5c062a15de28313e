"""Fredholm problems, truncated nonlinearities and small solutions."""

from fracplap.nonlinear.fredholm import linear_fredholm, solve_fredholm
from fracplap.nonlinear.hypotheses import check_hypotheses
from fracplap.nonlinear.models import (
    Hypothesis,
    HypothesisReport,
    LambdaCoupling,
    RHSSpec,
    RHSTerm,
    Solution,
    TruncationSpec,
)
from fracplap.nonlinear.rhs import NodalRHS, evaluate_rhs, residual
from fracplap.nonlinear.small import deduplicate, find_small_solutions, subspace_basis
from fracplap.nonlinear.truncation import (
    Truncation,
    TruncationChecks,
    build_truncation,
    check_truncation,
    growth_constant,
    modified_energy,
)

__all__ = [
    "Hypothesis",
    "HypothesisReport",
    "LambdaCoupling",
    "NodalRHS",
    "RHSSpec",
    "RHSTerm",
    "Solution",
    "Truncation",
    "TruncationChecks",
    "TruncationSpec",
    "build_truncation",
    "check_hypotheses",
    "check_truncation",
    "deduplicate",
    "evaluate_rhs",
    "find_small_solutions",
    "growth_constant",
    "linear_fredholm",
    "modified_energy",
    "residual",
    "solve_fredholm",
    "subspace_basis",
]
