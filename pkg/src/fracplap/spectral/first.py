"""
First eigenpair by projected descent on the constraint set ∫h|u|^p = 1.

Each step moves along the negative Sobolev gradient of the Rayleigh quotient
E(u)/∫h|u|^p (the quadratic Gram matrix is the metric), backtracks until the
Armijo condition holds and rescales u ← u/(∫h|u|^p)^{1/p}. Starts whose
iterates leave {∫h|u|^p > 0} are restarted from a bump supported in {h > 0}.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import numpy.typing as npt
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from fracplap.core.constants import (
    ARMIJO_C,
    ARMIJO_MIN_STEP,
    PROJECTION_RETRIES,
    SIMPLICITY_TOL,
)
from fracplap.core.errors import (
    ConstraintProjectionError,
    ConvergenceError,
    ValidationError,
)
from fracplap.core.logging_config import get_logger
from fracplap.discretization.gagliardo import (
    GramSolver,
    OperatorContext,
    apply_A,
    dual_norm,
    energy,
    energy_gradient,
    phi,
    weighted_mass,
)
from fracplap.discretization.grid import GridFunction, distance_to_boundary
from fracplap.spectral.models import EigenPair, SimplicityReport, SolverOptions

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]


def project(u: FloatArray, ctx: OperatorContext) -> FloatArray:
    """
    Rescale u onto ∫h|u|^p = 1.

    Raises:
        ConstraintProjectionError: If ∫h|u|^p <= 0
    """
    mass = weighted_mass(u, ctx.h, ctx.p, ctx.domain)
    if not mass > 0.0:
        raise ConstraintProjectionError(
            f"Constraint projection undefined: ∫h|u|^p = {mass:.3g} <= 0"
        )
    return u / mass ** (1.0 / ctx.p)


def positive_bump(ctx: OperatorContext, seed: int) -> FloatArray:
    """Seeded positive start supported where h > 0."""
    rng = np.random.default_rng(seed)
    rho = distance_to_boundary(ctx.domain)
    support = (ctx.h > 0.0).astype(float)
    return support * rho * (1.0 + 0.1 * rng.random(ctx.domain.n))


def tangential_gradient(u: FloatArray, ctx: OperatorContext, value: float) -> FloatArray:
    """Gradient of E/∫h|u|^p at a normalized u: p(∇(1/p)E − E·w h φ_p(u))."""
    w = ctx.domain.cell_weight
    return ctx.p * (energy_gradient(u, ctx.kernel) - value * w * ctx.h * phi(u, ctx.p))


def eigen_residual(
    lam: float, u: FloatArray, ctx: OperatorContext, gram: GramSolver | None = None
) -> float:
    """Dual norm of A(u) − λ h φ_p(u)."""
    defect = apply_A(u, ctx.kernel) - lam * ctx.h * phi(u, ctx.p)
    return dual_norm(defect, ctx.kernel, gram=gram).value


def residual(pair: EigenPair, ctx: OperatorContext) -> float:
    """
    Residual of an eigenpair.

    Raises:
        ValidationError: If the pair violates ∫h|u|^p = 1 (e.g. u = 0)
    """
    mass = weighted_mass(pair.u, ctx.h, ctx.p, ctx.domain)
    if abs(mass - 1.0) > 1e-6:
        raise ValidationError(
            f"Eigenpair normalization ∫h|u|^p = {mass:.6g} differs from 1"
        )
    return eigen_residual(pair.lam, np.asarray(pair.u.values), ctx)


def _sobolev_step(
    u: FloatArray, value: float, ctx: OperatorContext, gram: GramSolver
) -> tuple[FloatArray, float, float]:
    """Preconditioned direction, its slope and the defect estimate at u."""
    # scaled by 1/p so that a unit step is inverse iteration when p = 2
    gradient = tangential_gradient(u, ctx, value) / ctx.p
    direction = gram.solve(gradient)
    slope = float(gradient @ direction)
    # equals the dual norm of A(u) − λhφ_p(u) when p = 2
    return direction, slope, max(slope, 0.0) ** 0.5


def _descend(
    start: FloatArray, ctx: OperatorContext, opts: SolverOptions, gram: GramSolver
) -> tuple[FloatArray, float, int]:
    u = project(start, ctx)
    value = energy(u, ctx.kernel)
    direction, slope, defect = _sobolev_step(u, value, ctx, gram)
    step = opts.step0
    iterations = 0
    for iterations in range(1, opts.max_iter + 1):  # noqa: B007
        if defect < 0.1 * opts.tol:
            break
        accepted = None
        while step > ARMIJO_MIN_STEP:
            trial = u - step * direction
            mass = weighted_mass(trial, ctx.h, ctx.p, ctx.domain)
            if mass > 0.0:
                trial = trial / mass ** (1.0 / ctx.p)
                trial_value = energy(trial, ctx.kernel)
                if trial_value <= value - ARMIJO_C * step * slope:
                    accepted = (trial, trial_value, *_sobolev_step(trial, trial_value, ctx, gram))
                    break
                # energy differences below roundoff: accept steps that shrink the defect
                if abs(trial_value - value) <= 1e-13 * abs(value):
                    candidate = _sobolev_step(trial, trial_value, ctx, gram)
                    if candidate[2] < defect:
                        accepted = (trial, trial_value, *candidate)
                        break
            step *= 0.5
        if accepted is None:
            logger.debug(f"Line search stalled after {iterations} iterations")
            break
        u, value, direction, slope, defect = accepted
        step = min(2.0 * step, opts.step0)
    return u, value, iterations


def _finish(
    u: FloatArray, ctx: OperatorContext, opts: SolverOptions, gram: GramSolver, iterations: int
) -> EigenPair:
    # E(|u|) ≤ E(u) with the same constraint value, so the minimizer is taken nonnegative
    u = project(np.abs(u), ctx)
    value = energy(u, ctx.kernel)
    res = eigen_residual(value, u, ctx, gram)
    if res > opts.tol:
        raise ConvergenceError(
            f"First eigenpair residual {res:.3g} above tolerance {opts.tol:.3g} "
            f"after {iterations} iterations"
        )
    return EigenPair(
        lam=value,
        u=GridFunction(domain=ctx.domain, values=u),
        residual=res,
        normalization=weighted_mass(u, ctx.h, ctx.p, ctx.domain),
        iterations=iterations,
    )


def solve_first(
    ctx: OperatorContext,
    opts: SolverOptions | None = None,
    start: FloatArray | None = None,
) -> EigenPair:
    """
    Compute (λ₁, e₁) with λ₁ = E(e₁), ∫h|e₁|^p = 1 and e₁ > 0.

    Args:
        ctx: Kernel and weight
        opts: Solver options
        start: Optional initial vector; restarts after a failed projection
            always use a seeded positive bump

    Raises:
        ValidationError: If h has no positive node
        ConstraintProjectionError: If every restart left the constraint set
        ConvergenceError: If the residual stays above tolerance
    """
    opts = opts or SolverOptions()
    if not np.any(ctx.h > 0.0):
        raise ValidationError("solve_first requires |{h > 0}| > 0: no node with h > 0")
    gram = GramSolver(ctx.kernel)
    for attempt in Retrying(
        retry=retry_if_exception_type(ConstraintProjectionError),
        stop=stop_after_attempt(PROJECTION_RETRIES),
        reraise=True,
    ):
        with attempt:
            number = attempt.retry_state.attempt_number
            if number > 1:
                logger.warning(f"Restarting first-eigenpair descent (attempt {number})")
            initial = (
                start
                if start is not None and number == 1
                else positive_bump(ctx, opts.seed + number - 1)
            )
            u, _, iterations = _descend(np.asarray(initial, dtype=float), ctx, opts, gram)
            pair = _finish(u, ctx, opts, gram, iterations)
    logger.info(
        f"λ₁ = {pair.lam:.12g} (residual {pair.residual:.3g}, {pair.iterations} iterations)"
    )
    return pair


def _alignment_distance(u: FloatArray, v: FloatArray) -> float:
    cosine = abs(float(u @ v)) / (np.linalg.norm(u) * np.linalg.norm(v))
    return 1.0 - cosine


def check_simplicity(
    ctx: OperatorContext,
    trials: int = 10,
    opts: SolverOptions | None = None,
    threads: int = 1,
) -> SimplicityReport:
    """
    Run solve_first from seeded signed random starts and compare minimizers.

    The verdict is True when every pair is proportional up to SIMPLICITY_TOL
    after sign alignment and None when some trial fails.
    """
    opts = opts or SolverOptions()
    rng = np.random.default_rng(opts.seed)
    starts = [rng.standard_normal(ctx.domain.n) for _ in range(trials)]

    def run(index: int) -> EigenPair | None:
        trial_opts = opts.model_copy(update={"seed": opts.seed + 1000 + index})
        try:
            return solve_first(ctx, trial_opts, start=starts[index])
        except ConvergenceError as error:
            logger.warning(f"Simplicity trial {index} failed: {error}")
            return None

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        pairs = list(pool.map(run, range(trials)))

    if any(pair is None for pair in pairs):
        return SimplicityReport(simple=None, trials=trials, max_distance=float("nan"))
    vectors = [np.asarray(pair.u.values) for pair in pairs if pair is not None]
    distance = max(
        (
            _alignment_distance(vectors[i], vectors[j])
            for i in range(len(vectors))
            for j in range(i + 1, len(vectors))
        ),
        default=0.0,
    )
    return SimplicityReport(
        simple=distance <= SIMPLICITY_TOL,
        trials=trials,
        max_distance=distance,
        lambdas=[pair.lam for pair in pairs if pair is not None],
    )
