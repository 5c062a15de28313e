"""Grid, quadrature and Gagliardo energy discretization."""

from fracplap.discretization.gagliardo import (
    DualNorm,
    GramSolver,
    KernelMatrix,
    OperatorContext,
    apply_A,
    apply_H,
    assemble_kernel,
    dual_norm,
    e_norm,
    embedding_constant,
    energy,
    energy_gradient,
    energy_matrix,
    hardy_ratio,
    hessian,
    norm,
    pairing,
    phi,
    seminorm_qh,
    weighted_mass,
)
from fracplap.discretization.grid import (
    Domain1D,
    GridFunction,
    build_grid,
    distance_to_boundary,
    integrate,
)

__all__ = [
    "Domain1D",
    "DualNorm",
    "GramSolver",
    "GridFunction",
    "KernelMatrix",
    "OperatorContext",
    "apply_A",
    "apply_H",
    "assemble_kernel",
    "build_grid",
    "distance_to_boundary",
    "dual_norm",
    "e_norm",
    "embedding_constant",
    "energy",
    "energy_gradient",
    "energy_matrix",
    "hardy_ratio",
    "hessian",
    "integrate",
    "norm",
    "pairing",
    "phi",
    "seminorm_qh",
    "weighted_mass",
]
