"""
Non-resonant Fredholm problem A(u) − λhφ_p(u) = f for 0 < λ < λ₂, λ ≠ λ₁.

Below λ₁ the functional (1/p)E − (λ/p)∫h|u|^p − ⟨f, u⟩ is coercive and is
minimized directly. Between λ₁ and λ₂ the p = 2 problem is a dense linear
solve; for p ≠ 2 damped Newton runs from deterministic starts until one
converges.
"""

import numpy as np
import numpy.typing as npt
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from fracplap.core.constants import (
    CONDITION_THRESHOLD,
    FREDHOLM_STARTS,
    NEWTON_MAX_ITER,
    RESONANCE_GUARD,
)
from fracplap.core.errors import (
    ConvergenceError,
    NearResonanceError,
    NotFoundError,
    SingularSystemError,
    ValidationError,
)
from fracplap.core.logging_config import get_logger
from fracplap.discretization.gagliardo import GramSolver, OperatorContext, apply_A, dual_norm
from fracplap.discretization.grid import GridFunction, as_values
from fracplap.nonlinear.models import Solution
from fracplap.nonlinear.newton import damped_newton, minimize_newton
from fracplap.nonlinear.rhs import (
    NodalRHS,
    functional,
    functional_gradient,
    functional_hessian,
)
from fracplap.spectral.first import solve_first
from fracplap.spectral.models import SolverOptions
from fracplap.spectral.oracle import oracle_operator
from fracplap.spectral.second import solve_second

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]


def _nodal(lam: float, f: FloatArray, ctx: OperatorContext) -> NodalRHS:
    return NodalRHS(terms=(), p=ctx.p, coupling=lam * ctx.h, forcing=f)


def _solution(
    u: FloatArray, lam: float, nodal: NodalRHS, ctx: OperatorContext, method: str
) -> Solution:
    defect = apply_A(u, ctx.kernel) - nodal.f(u)
    return Solution(
        u=GridFunction(domain=ctx.domain, values=u),
        residual=dual_norm(defect, ctx.kernel).value,
        energy=functional(u, nodal, ctx.kernel),
        lam=lam,
        method=method,
    )


def _forcing(f: GridFunction | FloatArray, ctx: OperatorContext) -> FloatArray:
    values = as_values(f)
    if values.shape != (ctx.domain.n,):
        raise ValidationError(f"Forcing has {values.size} values, grid has n={ctx.domain.n}")
    return values


def linear_fredholm(lam: float, f: GridFunction | FloatArray, ctx: OperatorContext) -> Solution:
    """
    Dense solve of (M − λ w diag(h)) u = w f for p = 2.

    Raises:
        ValidationError: If p != 2
        SingularSystemError: If the condition number exceeds 10¹⁰
    """
    forcing = _forcing(f, ctx)
    matrix = oracle_operator(ctx, lam)
    condition = float(np.linalg.cond(matrix))
    if not condition < CONDITION_THRESHOLD:
        raise SingularSystemError(
            f"Fredholm system at λ={lam:.12g} is singular: condition number {condition:.3g} "
            f">= {CONDITION_THRESHOLD:.0e}"
        )
    u = np.linalg.solve(matrix, ctx.domain.cell_weight * forcing)
    logger.debug(f"Linear Fredholm solve at λ={lam:.6g}, condition number {condition:.3g}")
    return _solution(u, lam, _nodal(lam, forcing, ctx), ctx, "linear")


def _minimize(
    lam: float, forcing: FloatArray, ctx: OperatorContext, opts: SolverOptions
) -> Solution:
    nodal = _nodal(lam, forcing, ctx)
    kernel = ctx.kernel
    result = minimize_newton(
        lambda u: functional(u, nodal, kernel),
        lambda u: functional_gradient(u, nodal, kernel),
        lambda u: functional_hessian(u, nodal, kernel),
        np.zeros(ctx.domain.n),
        GramSolver(kernel),
        opts.tol,
        max(opts.max_iter, NEWTON_MAX_ITER),
    )
    solution = _solution(result.u, lam, nodal, ctx, "minimization")
    if solution.residual > opts.tol:
        raise ConvergenceError(
            f"Fredholm minimization at λ={lam:.6g} stopped with residual {solution.residual:.3g}"
        )
    return solution


def _fredholm_starts(
    forcing: FloatArray, ctx: OperatorContext, gram: GramSolver, seed: int
) -> list[FloatArray]:
    base = gram.solve(ctx.domain.cell_weight * forcing)
    scale = float(np.linalg.norm(base)) or 1.0
    rng = np.random.default_rng(seed)
    starts = [base, -base]
    while len(starts) < FREDHOLM_STARTS:
        direction = rng.standard_normal(ctx.domain.n)
        starts.append(scale * direction / np.linalg.norm(direction))
    return starts


def _multistart_newton(
    lam: float, forcing: FloatArray, ctx: OperatorContext, opts: SolverOptions
) -> Solution:
    nodal = _nodal(lam, forcing, ctx)
    kernel = ctx.kernel
    gram = GramSolver(kernel)
    starts = _fredholm_starts(forcing, ctx, gram, opts.seed)
    try:
        for attempt in Retrying(
            retry=retry_if_exception_type(ConvergenceError),
            stop=stop_after_attempt(len(starts)),
            reraise=True,
        ):
            with attempt:
                index = attempt.retry_state.attempt_number - 1
                result = damped_newton(
                    lambda u: functional_gradient(u, nodal, kernel),
                    lambda u: functional_hessian(u, nodal, kernel),
                    starts[index],
                    gram,
                    opts.tol,
                    NEWTON_MAX_ITER,
                )
                solution = _solution(result.u, lam, nodal, ctx, "newton")
                if solution.residual >= opts.tol:
                    logger.warning(
                        f"Fredholm start {index} ended at residual {solution.residual:.3g}"
                    )
                    raise ConvergenceError(f"start {index} residual {solution.residual:.3g}")
    except ConvergenceError as error:
        raise NotFoundError(
            f"No Fredholm solution at λ={lam:.6g} from {len(starts)} starts; "
            f"existence holds, so the solver budget is inadequate ({error})"
        ) from error
    return solution


def solve_fredholm(
    lam: float,
    f: GridFunction | FloatArray,
    ctx: OperatorContext,
    opts: SolverOptions | None = None,
    lambda1: float | None = None,
    lambda2: float | None = None,
) -> Solution:
    """
    Solve A(u) − λhφ_p(u) = f.

    Args:
        lam: Spectral parameter, 0 < λ < λ₂ and |λ − λ₁| > 10⁻³λ₁
        f: Forcing as a dual vector
        ctx: Kernel and weight h
        opts: Solver options
        lambda1: Precomputed λ₁ (computed when omitted)
        lambda2: Precomputed λ₂^(num) (computed when needed and omitted)

    Raises:
        ValidationError: If λ lies outside (0, λ₂)
        NearResonanceError: If λ is inside the guard around λ₁
        NotFoundError: If every Newton start fails (p ≠ 2, λ > λ₁)
    """
    opts = opts or SolverOptions()
    forcing = _forcing(f, ctx)
    if lam <= 0.0:
        raise ValidationError(f"solve_fredholm requires λ > 0, got λ={lam}")
    first = None
    if lambda1 is None:
        first = solve_first(ctx, opts)
        lambda1 = first.lam
    if abs(lam - lambda1) <= RESONANCE_GUARD * lambda1:
        raise NearResonanceError(
            f"λ={lam:.12g} is near-resonant: |λ − λ₁| <= {RESONANCE_GUARD:g}·λ₁ with λ₁={lambda1:.12g}"
        )
    if lam < lambda1:
        solution = _minimize(lam, forcing, ctx, opts)
    else:
        if lambda2 is None:
            lambda2 = solve_second(ctx, opts=opts, first=first).lambda2
        if lam >= lambda2:
            raise ValidationError(
                f"solve_fredholm requires λ < λ₂ = {lambda2:.12g}, got λ={lam:.12g}"
            )
        if ctx.p == 2.0:
            solution = linear_fredholm(lam, forcing, ctx)
        else:
            solution = _multistart_newton(lam, forcing, ctx, opts)
    logger.info(
        f"Fredholm solution at λ={lam:.6g} via {solution.method}: residual {solution.residual:.3g}"
    )
    return solution
