"""
Damped Newton iterations shared by the nonlinear solvers.

Both iterations measure progress with the Gram-preconditioned merit
√(gᵀM⁻¹g) of the Euclidean gradient g, which is the exact dual norm of the
defect when p = 2.
"""

from collections.abc import Callable

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict

from fracplap.core.constants import ARMIJO_C, ARMIJO_MIN_STEP
from fracplap.core.logging_config import get_logger
from fracplap.discretization.gagliardo import GramSolver

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]
VectorMap = Callable[[FloatArray], FloatArray]


class NewtonResult(BaseModel):
    """Final iterate, merit and iteration count."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    u: FloatArray
    merit: float
    iterations: int
    converged: bool


def merit(g: FloatArray, gram: GramSolver) -> float:
    return float(np.sqrt(max(float(g @ gram.solve(g)), 0.0)))


def _newton_direction(g: FloatArray, jacobian: FloatArray, gram: GramSolver) -> FloatArray:
    try:
        direction = np.linalg.solve(jacobian, -g)
    except np.linalg.LinAlgError:
        return -gram.solve(g)
    if not np.all(np.isfinite(direction)):
        return -gram.solve(g)
    return direction


def damped_newton(
    gradient: VectorMap,
    jacobian: Callable[[FloatArray], FloatArray],
    start: FloatArray,
    gram: GramSolver,
    tol: float,
    max_iter: int,
) -> NewtonResult:
    """
    Solve gradient(u) = 0 by Newton steps halved until the merit decreases.

    Falls back to the Gram-preconditioned gradient direction when the
    Jacobian is singular.
    """
    u = np.array(start, dtype=float)
    g = gradient(u)
    current = merit(g, gram)
    iterations = 0
    for iterations in range(1, max_iter + 1):  # noqa: B007
        if current < 0.1 * tol:
            return NewtonResult(u=u, merit=current, iterations=iterations - 1, converged=True)
        direction = _newton_direction(g, jacobian(u), gram)
        step = 1.0
        accepted = False
        while step > ARMIJO_MIN_STEP:
            trial = u + step * direction
            trial_g = gradient(trial)
            trial_merit = merit(trial_g, gram)
            if trial_merit <= (1.0 - ARMIJO_C * step) * current:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            logger.debug(f"Damped Newton stalled at merit {current:.3g} after {iterations} steps")
            break
        u, g, current = trial, trial_g, trial_merit
    return NewtonResult(u=u, merit=current, iterations=iterations, converged=current < tol)


def minimize_newton(
    value: Callable[[FloatArray], float],
    gradient: VectorMap,
    jacobian: Callable[[FloatArray], FloatArray],
    start: FloatArray,
    gram: GramSolver,
    tol: float,
    max_iter: int,
) -> NewtonResult:
    """
    Minimize a functional with Newton directions and an Armijo line search.

    A Newton direction that is not a descent direction is replaced by the
    negative Sobolev gradient. Once value differences fall below roundoff,
    steps that reduce the merit are accepted.
    """
    u = np.array(start, dtype=float)
    g = gradient(u)
    current = merit(g, gram)
    level = value(u)
    iterations = 0
    for iterations in range(1, max_iter + 1):  # noqa: B007
        if current < 0.1 * tol:
            return NewtonResult(u=u, merit=current, iterations=iterations - 1, converged=True)
        direction = _newton_direction(g, jacobian(u), gram)
        slope = float(g @ direction)
        if not slope < 0.0:
            direction = -gram.solve(g)
            slope = float(g @ direction)
        step = 1.0
        accepted = None
        while step > ARMIJO_MIN_STEP:
            trial = u + step * direction
            trial_level = value(trial)
            if trial_level <= level + ARMIJO_C * step * slope:
                accepted = trial, trial_level
                break
            if abs(trial_level - level) <= 1e-13 * max(abs(level), 1.0):
                trial_g = gradient(trial)
                if merit(trial_g, gram) < current:
                    accepted = trial, trial_level
                    break
            step *= 0.5
        if accepted is None:
            logger.debug(f"Newton minimization stalled at merit {current:.3g}")
            break
        u, level = accepted
        g = gradient(u)
        current = merit(g, gram)
    return NewtonResult(u=u, merit=current, iterations=iterations, converged=current < tol)
