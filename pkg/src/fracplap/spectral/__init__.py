"""First and second eigenpairs of the weighted fractional p-Laplacian."""

from fracplap.spectral.first import check_simplicity, residual, solve_first
from fracplap.spectral.models import (
    EigenPair,
    OddPath,
    SecondEigenResult,
    SimplicityReport,
    SolverOptions,
)
from fracplap.spectral.oracle import oracle_spectrum_p2
from fracplap.spectral.second import (
    default_path,
    refine_path,
    sign_parts_mass,
    solve_second,
)

__all__ = [
    "EigenPair",
    "OddPath",
    "SecondEigenResult",
    "SimplicityReport",
    "SolverOptions",
    "check_simplicity",
    "default_path",
    "oracle_spectrum_p2",
    "refine_path",
    "residual",
    "sign_parts_mass",
    "solve_first",
    "solve_second",
]
