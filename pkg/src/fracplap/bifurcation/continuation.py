"""
Pseudo-arclength continuation of A(u) = λhφ_p(u) + f(x, u) in (λ, u).

Each new point lies on the E-norm sphere of radius `step` around the last
accepted point: the corrector solves the equation together with
(λ − λ_a)² + ‖u − u_a‖² = step². Residuals are whitened by the Cholesky
factor of the quadratic Gram matrix, so their Euclidean norm is the p = 2
dual norm of the defect.
"""

from collections.abc import Callable

import numpy as np
import numpy.typing as npt
from scipy.linalg import cholesky, solve_triangular
from scipy.optimize import least_squares

from fracplap.bifurcation.models import (
    BifurcationReport,
    Branch,
    BranchPoint,
    BranchStatus,
)
from fracplap.core.constants import (
    BIFURCATION_MIN_POINTS,
    BIFURCATION_SMALL_NORM,
    BRANCH_EPSILON,
    BRANCH_LAMBDA_FACTOR,
    BRANCH_MAX_NORM,
    BRANCH_MIN_STEP,
    BRANCH_STEP,
    NEWTON_MAX_ITER,
)
from fracplap.core.errors import CorrectorError, ValidationError
from fracplap.core.logging_config import get_logger
from fracplap.discretization.gagliardo import (
    KernelMatrix,
    dual_norm,
    energy,
    energy_gradient,
    energy_matrix,
    hessian,
    norm,
    phi,
    phi_derivative,
)
from fracplap.discretization.grid import GridFunction
from fracplap.nonlinear.models import RHSSpec
from fracplap.nonlinear.rhs import NodalRHS, evaluate_rhs, residual
from fracplap.spectral.models import EigenPair, SolverOptions
from fracplap.weights.models import weight_values

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]
Constraint = Callable[[FloatArray], tuple[float, FloatArray]]


class _BranchSystem:
    """G(λ, u) = ∇(1/p)E(u) − w[λhφ_p(u) + f(u)] and its derivatives."""

    def __init__(self, rhs: RHSSpec, kernel: KernelMatrix):
        if rhs.lambda_coupling is None:
            raise ValidationError("Continuation needs a right-hand side with a λ-coupling term")
        if rhs.forcing is not None:
            raise ValidationError("Continuation needs f(x, 0) = 0; remove the forcing")
        self.rhs = rhs
        self.kernel = kernel
        self.h = weight_values(rhs.lambda_coupling.weight, kernel.domain)
        self.nodal: NodalRHS = evaluate_rhs(rhs.without_coupling(), kernel.domain, kernel.p)
        self.lower = cholesky(energy_matrix(kernel), lower=True)

    @property
    def p(self) -> float:
        return self.kernel.p

    def whiten(self, vector: FloatArray) -> FloatArray:
        return np.asarray(solve_triangular(self.lower, vector, lower=True), dtype=float)

    def value(self, x: FloatArray) -> FloatArray:
        lam, u = x[0], x[1:]
        w = self.kernel.cell_weight
        return energy_gradient(u, self.kernel) - w * (lam * self.h * phi(u, self.p) + self.nodal.f(u))

    def jacobian(self, x: FloatArray) -> FloatArray:
        lam, u = x[0], x[1:]
        w = self.kernel.cell_weight
        d_lam = -w * self.h * phi(u, self.p)
        d_u = hessian(u, self.kernel) - w * np.diag(
            lam * self.h * phi_derivative(u, self.p) + self.nodal.df(u)
        )
        return np.column_stack([d_lam, d_u])

    def point(self, x: FloatArray, step: float) -> BranchPoint:
        lam, u = float(x[0]), x[1:]
        _, res = residual(u, self.rhs.with_lambda(lam), self.kernel)
        return BranchPoint(
            lam=lam,
            u=GridFunction(domain=self.kernel.domain, values=u),
            norm=norm(u, self.kernel),
            residual=res,
            step=step,
        )


def e_distance(a: FloatArray, b: FloatArray, kernel: KernelMatrix) -> float:
    """(|λ_a − λ_b|² + ‖u_a − u_b‖²)^{1/2}."""
    return float(np.sqrt((a[0] - b[0]) ** 2 + norm(a[1:] - b[1:], kernel) ** 2))


def _sphere(anchor: FloatArray, radius: float, kernel: KernelMatrix) -> Constraint:
    p = kernel.p

    def constraint(x: FloatArray) -> tuple[float, FloatArray]:
        diff = x[1:] - anchor[1:]
        e = energy(diff, kernel)
        gradient = np.empty_like(x)
        gradient[0] = 2.0 * (x[0] - anchor[0]) / radius
        scale = 2.0 * e ** (2.0 / p - 1.0) if e > 0.0 else (2.0 if p == 2.0 else 0.0)
        gradient[1:] = scale * energy_gradient(diff, kernel) / radius
        value = ((x[0] - anchor[0]) ** 2 + e ** (2.0 / p) - radius**2) / radius
        return value, gradient

    return constraint


def _augmented(
    system: _BranchSystem, constraint: Constraint
) -> tuple[Callable[[FloatArray], FloatArray], Callable[[FloatArray], FloatArray]]:
    def fun(x: FloatArray) -> FloatArray:
        value, _ = constraint(x)
        return np.append(system.whiten(system.value(x)), value)

    def jac(x: FloatArray) -> FloatArray:
        _, gradient = constraint(x)
        return np.vstack([system.whiten(system.jacobian(x)), gradient])

    return fun, jac


def _newton(
    fun: Callable[[FloatArray], FloatArray],
    jac: Callable[[FloatArray], FloatArray],
    x0: FloatArray,
    tol: float,
) -> FloatArray:
    x = np.array(x0, dtype=float)
    f = fun(x)
    current = float(np.linalg.norm(f))
    for _ in range(NEWTON_MAX_ITER):
        if current < 0.1 * tol:
            return x
        try:
            delta = np.linalg.solve(jac(x), -f)
        except np.linalg.LinAlgError as error:
            raise CorrectorError(f"Singular corrector Jacobian: {error}") from error
        step = 1.0
        while step > 1e-10:
            trial = x + step * delta
            trial_f = fun(trial)
            trial_norm = float(np.linalg.norm(trial_f))
            if trial_norm < (1.0 - 1e-4 * step) * current:
                break
            step *= 0.5
        else:
            break
        x, f, current = trial, trial_f, trial_norm
    if current < tol:
        return x
    raise CorrectorError(f"Corrector stopped at augmented residual {current:.3g}")


def _least_squares(
    fun: Callable[[FloatArray], FloatArray],
    jac: Callable[[FloatArray], FloatArray],
    x0: FloatArray,
    tol: float,
) -> FloatArray:
    result = least_squares(fun, x0, jac=jac, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400)
    current = float(np.linalg.norm(result.fun))
    if current >= tol:
        raise CorrectorError(f"Least-squares corrector stopped at residual {current:.3g}")
    return np.asarray(result.x, dtype=float)


def _correct(
    system: _BranchSystem, constraint: Constraint, x0: FloatArray, opts: SolverOptions
) -> FloatArray:
    fun, jac = _augmented(system, constraint)
    if system.p == 2.0:
        return _newton(fun, jac, x0, opts.tol)
    return _least_squares(fun, jac, x0, opts.tol)


def _accepts(point: BranchPoint, opts: SolverOptions) -> bool:
    return point.residual <= opts.tol


def small_norm_ratio(
    rhs: RHSSpec, lam: float, t: float, direction: GridFunction, kernel: KernelMatrix
) -> float:
    """
    ‖F_λ(t·v)‖_* / t^{p−1} for ‖v‖ = 1.

    F_λ collects the power terms of rhs; the λ-coupling is excluded and the
    power terms do not depend on λ, so lam only labels the evaluation.

    Raises:
        ValidationError: If t <= 0, ‖v‖ differs from 1 or rhs has a forcing
    """
    if t <= 0.0:
        raise ValidationError(f"small_norm_ratio requires t > 0, got t={t}")
    if rhs.forcing is not None:
        raise ValidationError("small_norm_ratio requires f(x, 0) = 0; remove the forcing")
    length = norm(direction, kernel)
    if abs(length - 1.0) > 1e-8:
        raise ValidationError(f"small_norm_ratio requires ‖direction‖ = 1, got {length:.12g}")
    nodal = evaluate_rhs(rhs.without_coupling(), kernel.domain, kernel.p)
    values = t * np.asarray(direction.values, dtype=float)
    ratio = dual_norm(nodal.f(values), kernel).value / t ** (kernel.p - 1.0)
    logger.debug(f"small_norm_ratio(λ={lam:.6g}, t={t:.3g}) = {ratio:.6g}")
    return ratio


def initial_point(
    rhs: RHSSpec,
    pair: EigenPair,
    kernel: KernelMatrix,
    epsilon: float = BRANCH_EPSILON,
    sign: int = 1,
    opts: SolverOptions | None = None,
) -> BranchPoint:
    """
    Branch point near (λ₁, ±ε e₁).

    The corrector keeps the e₁-component ⟨hφ_p(e₁), u⟩ fixed at ±ε.

    Raises:
        CorrectorError: If the corrector does not converge
    """
    opts = opts or SolverOptions()
    if sign not in (1, -1):
        raise ValidationError(f"sign must be +1 or -1, got {sign}")
    system = _BranchSystem(rhs, kernel)
    e1 = np.asarray(pair.u.values, dtype=float)
    dual = kernel.cell_weight * system.h * phi(e1, kernel.p)
    gradient = np.concatenate([[0.0], dual])
    target = sign * epsilon

    def component(x: FloatArray) -> tuple[float, FloatArray]:
        return (float(dual @ x[1:]) - target) / epsilon, gradient / epsilon

    x0 = np.concatenate([[pair.lam], target * e1])
    x = _correct(system, component, x0, opts)
    point = system.point(x, 0.0)
    if not _accepts(point, opts):
        raise CorrectorError(f"Initial branch point residual {point.residual:.3g} above tolerance")
    logger.info(f"Branch start λ={point.lam:.12g}, ‖u‖={point.norm:.6g}")
    return point


def continue_branch(
    rhs: RHSSpec,
    start: BranchPoint,
    steps: int,
    kernel: KernelMatrix,
    step: float = BRANCH_STEP,
    lambda2: float | None = None,
    opts: SolverOptions | None = None,
) -> Branch:
    """
    Follow the solution branch through start for up to `steps` points.

    The first predictor moves along u/‖u‖ at fixed λ; later predictors use
    the secant through the last two corrected points. A failed corrector
    halves the step. Points reached with a halved step that lie closer than
    step/2 to the last stored point are stepping stones and are not stored,
    so stored neighbours are between step/2 and 3·step/2 apart in E-norm.
    The branch stops below BRANCH_MIN_STEP, once ‖u‖ > BRANCH_MAX_NORM
    or once λ leaves [0, BRANCH_LAMBDA_FACTOR·λ₂] (λ₂ defaults to start λ).

    Raises:
        ValidationError: If the start residual exceeds the tolerance
    """
    opts = opts or SolverOptions()
    if start.residual > opts.tol:
        raise ValidationError(
            f"continue_branch requires a start residual <= {opts.tol:.3g}, got {start.residual:.3g}"
        )
    system = _BranchSystem(rhs, kernel)
    lambda_max = BRANCH_LAMBDA_FACTOR * (lambda2 if lambda2 is not None else start.lam)
    points = [start]
    anchor = np.concatenate([[start.lam], np.asarray(start.u.values, dtype=float)])
    # last two corrected points, stored or not; they carry the secant
    trail = [anchor]
    current_step = step
    status = BranchStatus.MAX_STEPS
    while len(points) <= steps:
        last = trail[-1]
        if len(trail) == 1:
            tangent = np.concatenate([[0.0], last[1:] / max(start.norm, 1e-300)])
        else:
            tangent = (last - trail[-2]) / e_distance(last, trail[-2], kernel)
        predictor = last + current_step * tangent
        try:
            x = _correct(system, _sphere(last, current_step, kernel), predictor, opts)
            if len(trail) > 1 and e_distance(x, trail[-2], kernel) <= e_distance(
                last, trail[-2], kernel
            ):
                raise CorrectorError("Corrector returned toward the previous point")
            point = system.point(x, e_distance(x, anchor, kernel))
            if not _accepts(point, opts):
                raise CorrectorError(f"Point residual {point.residual:.3g} above tolerance")
        except CorrectorError as error:
            current_step *= 0.5
            logger.debug(f"Corrector failed ({error}); step halved to {current_step:.3g}")
            if current_step < BRANCH_MIN_STEP:
                status = BranchStatus.MIN_STEP
                break
            continue
        trail = [trail[-1], x]
        current_step = min(2.0 * current_step, step)
        if point.step < 0.5 * step:
            logger.debug(f"Sub-step point at E-distance {point.step:.3g} kept off the branch")
            continue
        points.append(point)
        anchor = x
        if point.norm > BRANCH_MAX_NORM:
            status = BranchStatus.MAX_NORM
            break
        if not 0.0 <= point.lam <= lambda_max:
            status = BranchStatus.LAMBDA_BOUND
            break
    logger.info(
        f"Branch of {len(points)} points ended with status {status.value}; "
        f"last λ={points[-1].lam:.6g}, ‖u‖={points[-1].norm:.6g}"
    )
    return Branch(points=points, step=step, status=status)


def mirror_branch(branch: Branch, rhs: RHSSpec, kernel: KernelMatrix) -> Branch:
    """(λ, −u) for every point, with residuals evaluated anew."""
    mirrored = []
    for point in branch.points:
        u = -point.u
        _, res = residual(u, rhs.with_lambda(point.lam), kernel)
        mirrored.append(point.model_copy(update={"u": u, "residual": res}))
    return branch.model_copy(update={"points": mirrored})


def detect_bifurcation(branch: Branch, lambda1: float) -> BifurcationReport:
    """
    Extrapolate λ linearly in ‖u‖ to ‖u‖ = 0 over the points with ‖u‖ < 0.1.

    Fewer than five such points give an inconclusive report.
    """
    small = [point for point in branch.points if point.norm < BIFURCATION_SMALL_NORM]
    if len(small) < BIFURCATION_MIN_POINTS:
        diagnostic = (
            f"{len(small)} points with ‖u‖ < {BIFURCATION_SMALL_NORM:g}; "
            f"{BIFURCATION_MIN_POINTS} needed"
        )
        logger.warning(f"Bifurcation detection inconclusive: {diagnostic}")
        return BifurcationReport(lambda1=lambda1, points_used=len(small), diagnostic=diagnostic)
    norms = np.array([point.norm for point in small])
    lambdas = np.array([point.lam for point in small])
    slope, intercept = np.polyfit(norms, lambdas, 1)
    deviation = abs(float(intercept) - lambda1) / lambda1
    return BifurcationReport(
        lambda1=lambda1,
        lambda0=float(intercept),
        relative_deviation=deviation,
        slope=float(slope),
        points_used=len(small),
        conclusive=True,
        diagnostic=f"λ₀ = {intercept:.12g} from {len(small)} points",
    )
