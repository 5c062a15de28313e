"""
Search for small solutions through the modified functional Φ̃.

Level n works in X_n, the span of the first n eigenvectors of the quadratic
energy with h ≡ 1. Every start is scaled along its ray to the minimum of Φ̃,
then polished by damped Newton on the full grid. Critical points with
Φ̃ < 0, small residual and |u|_∞ < t1 are kept, with u and −u identified.
f̃ = f only on [−t2, t2], so each solution records whether it also solves
the original problem.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import numpy.typing as npt
from scipy.linalg import eigh
from scipy.optimize import minimize_scalar

from fracplap.core.constants import (
    DEDUP_TOL,
    NEWTON_MAX_ITER,
    SMALL_SOLUTION_STARTS,
)
from fracplap.core.errors import ValidationError
from fracplap.core.logging_config import get_logger
from fracplap.discretization.gagliardo import (
    GramSolver,
    KernelMatrix,
    OperatorContext,
    apply_A,
    dual_norm,
    energy_matrix,
)
from fracplap.discretization.grid import GridFunction
from fracplap.nonlinear.hypotheses import check_hypotheses
from fracplap.nonlinear.models import (
    Hypothesis,
    RHSSpec,
    Solution,
    TruncationSpec,
)
from fracplap.nonlinear.newton import damped_newton
from fracplap.nonlinear.truncation import (
    Truncation,
    build_truncation,
    modified_energy,
    modified_gradient,
    modified_hessian,
)
from fracplap.spectral.models import SolverOptions
from fracplap.weights.models import SpaceParams

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]


def subspace_basis(kernel: KernelMatrix, n: int) -> FloatArray:
    """Columns φ_1..φ_n: lowest eigenvectors of M v = μ w v."""
    if not 1 <= n <= kernel.n:
        raise ValidationError(f"Subspace dimension must lie in [1, {kernel.n}], got {n}")
    _, vectors = eigh(
        energy_matrix(kernel),
        kernel.cell_weight * np.eye(kernel.n),
        subset_by_index=[0, n - 1],
    )
    return np.asarray(vectors, dtype=float)


def _ray_minimum(
    direction: FloatArray, truncation: Truncation, kernel: KernelMatrix
) -> FloatArray:
    direction = direction / np.max(np.abs(direction))
    upper = 4.0 * truncation.t2
    result = minimize_scalar(
        lambda t: modified_energy(t * direction, truncation, kernel),
        bounds=(0.0, upper),
        method="bounded",
        options={"xatol": 1e-10 * upper},
    )
    return float(result.x) * direction


def _level_starts(basis: FloatArray, level: int, seed: int, count: int) -> list[FloatArray]:
    rng = np.random.default_rng(seed + 1000 * level)
    starts = [basis[:, level - 1].copy()]
    while len(starts) < count:
        starts.append(basis[:, :level] @ rng.standard_normal(level))
    return starts


def _polish(
    start: FloatArray,
    truncation: Truncation,
    kernel: KernelMatrix,
    gram: GramSolver,
    opts: SolverOptions,
) -> FloatArray | None:
    seed_point = _ray_minimum(start, truncation, kernel)
    result = damped_newton(
        lambda u: modified_gradient(u, truncation, kernel),
        lambda u: modified_hessian(u, truncation, kernel),
        seed_point,
        gram,
        opts.tol,
        NEWTON_MAX_ITER,
    )
    return result.u if result.converged else None


def _oriented(u: FloatArray) -> FloatArray:
    total = float(np.sum(u))
    if total < 0.0 or (total == 0.0 and u[int(np.argmax(np.abs(u)))] < 0.0):
        return -u
    return u


def deduplicate(solutions: list[Solution], tol: float = DEDUP_TOL) -> list[Solution]:
    """Drop solutions within L² distance tol of an earlier one or of its negative."""
    kept: list[Solution] = []
    for candidate in solutions:
        values = np.asarray(candidate.u.values)
        w = candidate.u.domain.cell_weight
        duplicate = False
        for existing in kept:
            other = np.asarray(existing.u.values)
            distance = min(
                np.sqrt(w * np.sum((values - other) ** 2)),
                np.sqrt(w * np.sum((values + other) ** 2)),
            )
            if distance < tol:
                duplicate = True
                break
        if not duplicate:
            kept.append(candidate)
    return kept


def find_small_solutions(
    rhs: RHSSpec,
    spec: TruncationSpec,
    ctx: OperatorContext,
    n_levels: int,
    opts: SolverOptions | None = None,
    threads: int = 1,
    truncation: Truncation | None = None,
) -> list[Solution]:
    """
    Critical points of Φ̃ with negative energy that solve the original problem.

    Args:
        rhs: Odd sublinear right-hand side
        spec: Truncation levels
        ctx: Kernel (ctx.weight is not used; weights live in rhs)
        n_levels: Number of subspace levels X_1..X_n
        opts: Solver options (tol, seed)
        threads: Worker cap for the independent starts
        truncation: Prebuilt truncation, built from spec when omitted

    Returns:
        Distinct solutions sorted by Φ̃ ascending

    Raises:
        ValidationError: If (F4)–(F6) fail for rhs
    """
    opts = opts or SolverOptions()
    kernel = ctx.kernel
    params = SpaceParams(N=1, p=kernel.p, s=kernel.s)
    failed = [
        report
        for report in (
            check_hypotheses(rhs, which, ctx.domain, params)
            for which in (Hypothesis.F4, Hypothesis.F5, Hypothesis.F6)
        )
        if not report.holds
    ]
    if failed:
        details = "; ".join(f"({r.which.value}) {', '.join(r.violations)}" for r in failed)
        raise ValidationError(f"find_small_solutions preconditions fail: {details}")
    truncation = truncation or build_truncation(rhs, spec, kernel)
    basis = subspace_basis(kernel, n_levels)
    gram = GramSolver(kernel)
    tasks = [
        (level, start)
        for level in range(1, n_levels + 1)
        for start in _level_starts(basis, level, opts.seed, SMALL_SOLUTION_STARTS)
    ]

    def run(task: tuple[int, FloatArray]) -> Solution | None:
        level, start = task
        u = _polish(start, truncation, kernel, gram, opts)
        if u is None:
            return None
        value = modified_energy(u, truncation, kernel)
        defect = apply_A(u, kernel) - truncation.f(u)
        res = dual_norm(defect, kernel, gram=gram).value
        if not (value < 0.0 and res < opts.tol and np.max(np.abs(u)) < truncation.t1):
            return None
        untruncated = apply_A(u, kernel) - truncation.nodal.f(u)
        original = dual_norm(untruncated, kernel, gram=gram).value
        return Solution(
            u=GridFunction(domain=ctx.domain, values=_oriented(u)),
            residual=res,
            energy=value,
            method="truncated-newton",
            level=level,
            untruncated_residual=original,
            solves_original=original < opts.tol,
        )

    with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
        found = [solution for solution in pool.map(run, tasks) if solution is not None]

    distinct = deduplicate(found)
    levels_with_solutions = {solution.level for solution in distinct}
    for level in range(1, n_levels + 1):
        if level not in levels_with_solutions:
            logger.warning(f"No new negative-energy critical point found at level {level}")
    stray = sum(1 for solution in distinct if not solution.solves_original)
    if stray:
        logger.warning(
            f"{stray} of {len(distinct)} solutions leave [−t2, t2] and do not solve the original problem"
        )
    distinct.sort(key=lambda solution: solution.energy)
    logger.info(f"Found {len(distinct)} distinct small solution pairs over {n_levels} levels")
    return distinct
