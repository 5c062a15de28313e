"""Continuation of solution branches and detection of bifurcation from λ₁."""

from fracplap.bifurcation.continuation import (
    continue_branch,
    detect_bifurcation,
    e_distance,
    initial_point,
    mirror_branch,
    small_norm_ratio,
)
from fracplap.bifurcation.models import (
    BifurcationReport,
    Branch,
    BranchPoint,
    BranchStatus,
)

__all__ = [
    "BifurcationReport",
    "Branch",
    "BranchPoint",
    "BranchStatus",
    "continue_branch",
    "detect_bifurcation",
    "e_distance",
    "initial_point",
    "mirror_branch",
    "small_norm_ratio",
]
