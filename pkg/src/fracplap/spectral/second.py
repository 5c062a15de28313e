"""
Second eigenvalue as the minimax of the energy over odd loops.

An odd loop of m points on the constraint set is relaxed with a string
method: the free half of the loop descends along the Sobolev gradient of the
Rayleigh quotient, is reprojected, redistributed by arclength and mirrored.
The highest point climbs (its gradient component along the path is
reversed), so the loop maximum converges to the mountain-pass level.
"""

import numpy as np
import numpy.typing as npt

from fracplap.core.constants import (
    PATH_MAX_ITER,
    PATH_MIN_SPACING,
    PATH_POINTS,
    PATH_TOL,
)
from fracplap.core.logging_config import get_logger
from fracplap.discretization.gagliardo import (
    GramSolver,
    OperatorContext,
    energy,
    phi,
    weighted_mass,
)
from fracplap.discretization.grid import GridFunction
from fracplap.spectral.first import project, solve_first, tangential_gradient
from fracplap.spectral.models import (
    EigenPair,
    OddPath,
    SecondEigenResult,
    SolverOptions,
)

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]

# explicit Euler step of the relaxation, in units of the inverse-iteration step
_RELAX_STEP = 0.3


def second_direction(first: EigenPair, ctx: OperatorContext) -> FloatArray:
    """Sign-changing direction h-orthogonal to e₁ (odd about the midpoint)."""
    e1 = np.asarray(first.u.values)
    x = ctx.domain.nodes - ctx.domain.midpoint
    candidate = e1 * x / ctx.domain.length
    w = ctx.domain.cell_weight
    dual = w * ctx.h * phi(e1, ctx.p)
    candidate = candidate - float(dual @ candidate) / float(dual @ e1) * e1
    return candidate


def default_path(
    ctx: OperatorContext, first: EigenPair, m: int = PATH_POINTS
) -> OddPath:
    """Great circle through e₁ and an h-orthogonal direction, reprojected."""
    e1 = np.asarray(first.u.values)
    v = project(second_direction(first, ctx), ctx)
    half = []
    for k in range(m // 2):
        theta = 2.0 * np.pi * k / m
        point = project(np.cos(theta) * e1 + np.sin(theta) * v, ctx)
        half.append(GridFunction(domain=ctx.domain, values=point))
    return OddPath.from_half(half)


def refine_path(path: OddPath, ctx: OperatorContext) -> OddPath:
    """Double m by inserting reprojected midpoints."""
    points = [np.asarray(point.values) for point in path.points]
    half = []
    for k in range(path.m // 2):
        half.append(points[k])
        half.append(project(0.5 * (points[k] + points[(k + 1) % path.m]), ctx))
    return OddPath.from_half([GridFunction(domain=ctx.domain, values=p) for p in half])


def _arclength_redistribute(
    nodes: list[FloatArray], metric: FloatArray, ctx: OperatorContext
) -> list[FloatArray]:
    """Equal spacing along a polyline with fixed endpoints, reprojected."""
    if len(nodes) <= 2:
        return nodes
    steps = [
        float(np.sqrt(max((b - a) @ metric @ (b - a), 0.0)))
        for a, b in zip(nodes[:-1], nodes[1:], strict=True)
    ]
    lengths = np.concatenate([[0.0], np.cumsum(steps)])
    if lengths[-1] <= PATH_MIN_SPACING:
        return nodes
    targets = np.linspace(0.0, lengths[-1], len(nodes))
    result = [nodes[0]]
    for target in targets[1:-1]:
        segment = int(np.clip(np.searchsorted(lengths, target) - 1, 0, len(steps) - 1))
        span = steps[segment] if steps[segment] > 0.0 else 1.0
        fraction = (target - lengths[segment]) / span
        blended = (1.0 - fraction) * nodes[segment] + fraction * nodes[segment + 1]
        result.append(project(blended, ctx))
    result.append(nodes[-1])
    return result


def sign_parts_mass(u: GridFunction, ctx: OperatorContext) -> tuple[float, float]:
    """(∫h u₊^p, ∫h u₋^p)."""
    values = np.asarray(u.values)
    positive = weighted_mass(np.maximum(values, 0.0), ctx.h, ctx.p, ctx.domain)
    negative = weighted_mass(np.maximum(-values, 0.0), ctx.h, ctx.p, ctx.domain)
    return positive, negative


def solve_second(
    ctx: OperatorContext,
    path: OddPath | None = None,
    opts: SolverOptions | None = None,
    first: EigenPair | None = None,
    climbing: bool = True,
    max_iter: int = PATH_MAX_ITER,
) -> SecondEigenResult:
    """
    Minimize the maximum energy over an odd loop on ∫h|u|^p = 1.

    Args:
        ctx: Kernel and weight
        path: Initial loop; defaults to the great circle through e₁
        opts: Solver options (tol ends the climbing-point descent)
        first: Precomputed first eigenpair for the default path
        climbing: Whether the highest point climbs to the saddle
        max_iter: Relaxation sweeps

    Returns:
        The loop maximum λ₂^(num) together with the relaxed loop
    """
    opts = opts or SolverOptions()
    if path is None:
        first = first or solve_first(ctx, opts)
        path = default_path(ctx, first)
    gram = GramSolver(ctx.kernel)
    metric = gram.matrix
    half_m = path.m // 2
    # free half plus the mirrored closing node
    nodes = [np.asarray(point.values, dtype=float) for point in path.points[:half_m]]
    nodes.append(-nodes[0])
    step = _RELAX_STEP
    previous = np.inf
    converged = False
    iteration = 0
    for iteration in range(1, max_iter + 1):  # noqa: B007
        energies = np.array([energy(node, ctx.kernel) for node in nodes[:-1]])
        top = int(np.argmax(energies))
        updated: list[FloatArray] = []
        top_defect = 0.0
        for k, node in enumerate(nodes[:-1]):
            direction = gram.solve(tangential_gradient(node, ctx, energies[k]) / ctx.p)
            if climbing and k == top:
                before = nodes[k - 1] if k > 0 else -nodes[half_m - 1]
                tangent = nodes[k + 1] - before
                length = float(tangent @ metric @ tangent)
                if length > 0.0:
                    tangent = tangent / np.sqrt(length)
                    direction = direction - 2.0 * float(direction @ metric @ tangent) * tangent
                top_defect = float(np.sqrt(max(direction @ metric @ direction, 0.0)))
            updated.append(project(node - step * direction, ctx))
        updated.append(-updated[0])
        if climbing and 0 < top < half_m:
            nodes = _arclength_redistribute(updated[: top + 1], metric, ctx)[:-1] + (
                _arclength_redistribute(updated[top:], metric, ctx)
            )
        else:
            nodes = _arclength_redistribute(updated, metric, ctx)
        nodes[-1] = -nodes[0]
        current = float(max(energy(node, ctx.kernel) for node in nodes[:-1]))
        if current > previous * (1.0 + 1e-3):
            step *= 0.5
            logger.debug(f"Path maximum increased; relaxation step now {step:.3g}")
        change = abs(previous - current) / current
        previous = current
        if change < PATH_TOL and (not climbing or top_defect < np.sqrt(opts.tol)):
            converged = True
            break
    if not converged:
        logger.warning(f"Odd-path relaxation stopped after {iteration} sweeps")
    energies = np.array([energy(node, ctx.kernel) for node in nodes[:-1]])
    top = int(np.argmax(energies))
    relaxed = OddPath.from_half(
        [GridFunction(domain=ctx.domain, values=node) for node in nodes[:-1]]
    )
    logger.info(f"λ₂(num) = {energies[top]:.12g} after {iteration} sweeps")
    return SecondEigenResult(
        lambda2=float(energies[top]),
        path=relaxed,
        max_index=top,
        iterations=iteration,
        converged=converged,
    )
