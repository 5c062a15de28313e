"""
Dense generalized eigensolver for p = 2.

The weighted mass matrix w·diag(h) may be singular or indefinite, so the
pencil is solved as B v = μ M v with the energy matrix M as the positive
definite metric; every positive μ gives the eigenvalue λ = 1/μ.
"""

import numpy as np
from scipy.linalg import eigh

from fracplap.core.errors import ValidationError
from fracplap.core.logging_config import get_logger
from fracplap.discretization.gagliardo import OperatorContext, energy_matrix
from fracplap.discretization.grid import GridFunction

logger = get_logger(__name__)


def oracle_spectrum_p2(ctx: OperatorContext) -> list[tuple[float, GridFunction]]:
    """
    All positive generalized eigenvalues of (M, w·diag(h)), ascending.

    Eigenvectors are normalized to ∫h u² = 1 with ∫u ≥ 0.

    Raises:
        ValidationError: If p != 2
    """
    if ctx.p != 2.0:
        raise ValidationError(f"oracle_spectrum_p2 requires p = 2, got p={ctx.p}")
    w = ctx.domain.cell_weight
    mass = w * np.diag(ctx.h)
    mu, vectors = eigh(mass, energy_matrix(ctx.kernel))
    spectrum: list[tuple[float, GridFunction]] = []
    for value, vector in zip(mu, vectors.T, strict=True):
        if value <= 0.0:
            continue
        weighted = float(w * np.sum(ctx.h * vector**2))
        u = vector / np.sqrt(weighted)
        total = float(np.sum(u))
        if total < 0.0 or (total == 0.0 and u[np.flatnonzero(u)[0]] < 0.0):
            u = -u
        spectrum.append((float(1.0 / value), GridFunction(domain=ctx.domain, values=u)))
    spectrum.sort(key=lambda item: item[0])
    logger.debug(f"Oracle spectrum: {len(spectrum)} positive eigenvalues")
    return spectrum


def oracle_operator(ctx: OperatorContext, lam: float) -> np.ndarray:
    """Matrix M − λ w diag(h) of the p = 2 Fredholm problem."""
    if ctx.p != 2.0:
        raise ValidationError(f"The linear Fredholm operator requires p = 2, got p={ctx.p}")
    return energy_matrix(ctx.kernel) - lam * ctx.domain.cell_weight * np.diag(ctx.h)
