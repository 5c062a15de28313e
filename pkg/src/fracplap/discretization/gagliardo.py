"""
Discrete Gagliardo energy and the operators derived from it.

For nodal values u on a uniform 1-D grid extended by zero,

    E(u) = Σ_{i≠j} K_ij |u_i − u_j|^p + Σ_i tail_i |u_i|^p,

with K_ij = w²/|x_i − x_j|^{1+sp} and the exterior tail integrated exactly.
Dual vectors are stored as nodal arrays F and act by ⟨F, v⟩ = Σ_i w F_i v_i;
`energy_gradient` returns the Euclidean gradient of (1/p)E, which is w·A(u).
"""

import math

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.linalg import cho_factor, cho_solve

from fracplap.core.constants import (
    DEFAULT_SEED,
    DUAL_NORM_MAX_ITER,
    DUAL_NORM_TOL,
    PSEUDO_DIFF_FLOOR,
)
from fracplap.core.errors import ValidationError
from fracplap.core.logging_config import get_logger
from fracplap.discretization.grid import (
    Domain1D,
    GridFunction,
    as_values,
    distance_to_boundary,
)

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]
VectorLike = GridFunction | FloatArray


class KernelMatrix(BaseModel):
    """Pair kernel K and exterior tail weights of the discrete energy."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    domain: Domain1D
    s: float = Field(gt=0.0, lt=1.0, description="Fractional order")
    p: float = Field(gt=1.0, description="Integrability exponent")
    K: FloatArray = Field(description="Symmetric n×n pair kernel, zero diagonal")
    tail: FloatArray = Field(description="Exterior interaction weight per node")

    @field_validator("K", "tail", mode="before")
    @classmethod
    def _readonly(cls, value: FloatArray) -> FloatArray:
        array = np.array(value, dtype=float)
        array.flags.writeable = False
        return array

    @property
    def n(self) -> int:
        return self.domain.n

    @property
    def cell_weight(self) -> float:
        return self.domain.cell_weight


class OperatorContext(BaseModel):
    """Kernel together with the eigenvalue weight h and a growth exponent q."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kernel: KernelMatrix
    weight: GridFunction = Field(description="Nodal weight h")
    q: float = Field(default=2.0, ge=1.0)

    @model_validator(mode="after")
    def _check_dimensions(self) -> "OperatorContext":
        if self.weight.values.shape != (self.kernel.n,):
            raise ValueError(
                f"Weight has {self.weight.values.size} values, kernel has n={self.kernel.n}"
            )
        return self

    @property
    def p(self) -> float:
        return self.kernel.p

    @property
    def domain(self) -> Domain1D:
        return self.kernel.domain

    @property
    def h(self) -> FloatArray:
        return np.asarray(self.weight.values, dtype=float)


class DualNorm(BaseModel):
    """Value of a dual norm and how it was obtained."""

    value: float
    converged: bool = True
    iterations: int = 0
    method: str = "gram"


def phi(t: FloatArray | float, p: float) -> FloatArray:
    """φ_p(t) = |t|^{p−2} t."""
    t = np.asarray(t, dtype=float)
    return np.sign(t) * np.abs(t) ** (p - 1.0)


def phi_derivative(t: FloatArray, p: float, floor: float = PSEUDO_DIFF_FLOOR) -> FloatArray:
    """(p − 1)|t|^{p−2}, with |t| floored when p < 2."""
    magnitude = np.abs(np.asarray(t, dtype=float))
    if p < 2.0:
        magnitude = np.maximum(magnitude, floor)
    return (p - 1.0) * magnitude ** (p - 2.0)


def assemble_kernel(domain: Domain1D, s: float, p: float) -> KernelMatrix:
    """
    Assemble the pair kernel and the exact exterior tails.

    Raises:
        ValidationError: If s ∉ (0, 1), p <= 1 or s·p >= 1
    """
    if not 0.0 < s < 1.0:
        raise ValidationError(f"assemble_kernel requires 0 < s < 1, got s={s}")
    if p <= 1.0:
        raise ValidationError(f"assemble_kernel requires p > 1, got p={p}")
    sp = s * p
    if sp >= 1.0:
        raise ValidationError(
            f"assemble_kernel requires s*p < 1 (N = 1), got s*p={sp:.6g}"
        )
    x = domain.nodes
    w = domain.cell_weight
    distance = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(distance, 1.0)
    K = w**2 / distance ** (1.0 + sp)
    np.fill_diagonal(K, 0.0)
    tail = 2.0 * w * ((x - domain.left) ** (-sp) + (domain.right - x) ** (-sp)) / sp
    logger.debug(f"Assembled kernel n={domain.n}, s={s}, p={p}")
    return KernelMatrix(domain=domain, s=s, p=p, K=K, tail=tail)


def energy(u: VectorLike, kernel: KernelMatrix) -> float:
    """E(u) = ‖u‖^p of the discrete Gagliardo norm."""
    values = as_values(u)
    diff = np.abs(values[:, None] - values[None, :])
    pair = float(np.sum(kernel.K * diff**kernel.p))
    return pair + float(np.sum(kernel.tail * np.abs(values) ** kernel.p))


def norm(u: VectorLike, kernel: KernelMatrix) -> float:
    return energy(u, kernel) ** (1.0 / kernel.p)


def energy_gradient(u: VectorLike, kernel: KernelMatrix) -> FloatArray:
    """Euclidean gradient of (1/p)E: 2Σ_j K_ij φ_p(u_i − u_j) + tail_i φ_p(u_i)."""
    values = as_values(u)
    diff = values[:, None] - values[None, :]
    pair = 2.0 * np.sum(kernel.K * phi(diff, kernel.p), axis=1)
    return pair + kernel.tail * phi(values, kernel.p)


def apply_A(u: VectorLike, kernel: KernelMatrix) -> FloatArray:
    """Dual vector A(u), so that ⟨A(u), v⟩ is the derivative of (1/p)E at u along v."""
    return energy_gradient(u, kernel) / kernel.cell_weight


def apply_H(u: VectorLike, ctx: OperatorContext) -> FloatArray:
    """Dual vector H(u) = h φ_p(u)."""
    return ctx.h * phi(as_values(u), ctx.p)


def pairing(F: FloatArray, v: VectorLike, domain: Domain1D) -> float:
    """⟨F, v⟩ = Σ_i w F_i v_i."""
    return float(domain.cell_weight * np.dot(np.asarray(F, dtype=float), as_values(v)))


def weighted_mass(u: VectorLike, h: FloatArray, p: float, domain: Domain1D) -> float:
    """∫ h |u|^p by quadrature."""
    return float(domain.cell_weight * np.sum(h * np.abs(as_values(u)) ** p))


def seminorm_qh(u: VectorLike, ctx: OperatorContext) -> float:
    """|u|_{q,h} = (∫ |h| |u|^q)^{1/q}."""
    total = weighted_mass(u, np.abs(ctx.h), ctx.q, ctx.domain)
    return total ** (1.0 / ctx.q)


def hardy_ratio(u: VectorLike, kernel: KernelMatrix) -> float:
    """
    [∫ |u|^p / ρ^{sp}] / E(u).

    Raises:
        ValidationError: For the zero vector
    """
    values = as_values(u)
    if not np.any(values):
        raise ValidationError("hardy_ratio is undefined for u = 0")
    rho = distance_to_boundary(kernel.domain)
    numerator = kernel.cell_weight * float(
        np.sum(np.abs(values) ** kernel.p / rho ** (kernel.s * kernel.p))
    )
    return numerator / energy(values, kernel)


def energy_matrix(kernel: KernelMatrix) -> FloatArray:
    """Gram matrix M = 2(D − K) + diag(tail) of the quadratic energy uᵀMu."""
    degree = np.sum(kernel.K, axis=1)
    return 2.0 * (np.diag(degree) - kernel.K) + np.diag(kernel.tail)


def hessian(u: VectorLike, kernel: KernelMatrix, floor: float = PSEUDO_DIFF_FLOOR) -> FloatArray:
    """Jacobian of `energy_gradient` at u."""
    values = as_values(u)
    diff = values[:, None] - values[None, :]
    coupling = 2.0 * kernel.K * phi_derivative(diff, kernel.p, floor)
    np.fill_diagonal(coupling, 0.0)
    diagonal = np.sum(coupling, axis=1) + kernel.tail * phi_derivative(
        values, kernel.p, floor
    )
    matrix = -coupling
    matrix[np.diag_indices_from(matrix)] = diagonal
    return matrix


def e_norm(lam: float, u: VectorLike, kernel: KernelMatrix) -> float:
    """(|λ|² + ‖u‖²)^{1/2} on R × W₀^{s,p}."""
    return math.sqrt(lam**2 + norm(u, kernel) ** 2)


class GramSolver:
    """Cholesky factorization of the quadratic energy matrix."""

    def __init__(self, kernel: KernelMatrix):
        self.kernel = kernel
        self.matrix = energy_matrix(kernel)
        self._factor = cho_factor(self.matrix)

    def solve(self, rhs: FloatArray) -> FloatArray:
        return np.asarray(cho_solve(self._factor, rhs), dtype=float)


def dual_norm(
    F: FloatArray,
    kernel: KernelMatrix,
    seed: int = DEFAULT_SEED,
    max_iter: int = DUAL_NORM_MAX_ITER,
    gram: GramSolver | None = None,
) -> DualNorm:
    """
    sup_{v ≠ 0} ⟨F, v⟩ / ‖v‖.

    For p = 2 the supremum is √(gᵀM⁻¹g) with g = wF. Otherwise a normalized
    ascent on v ↦ ⟨F, v⟩/‖v‖ is run from a seeded start, preconditioned by
    the quadratic Gram matrix, halving the step whenever the value does not
    increase. Non-convergence keeps the best lower bound found.
    """
    g = kernel.cell_weight * np.asarray(F, dtype=float)
    if not np.any(g):
        return DualNorm(value=0.0)
    gram = gram or GramSolver(kernel)
    if kernel.p == 2.0:
        return DualNorm(value=math.sqrt(max(float(g @ gram.solve(g)), 0.0)))
    return _dual_norm_ascent(g, kernel, gram, seed, max_iter)


def _normalized(v: FloatArray, kernel: KernelMatrix) -> FloatArray:
    return v / energy(v, kernel) ** (1.0 / kernel.p)


def _dual_norm_ascent(
    g: FloatArray, kernel: KernelMatrix, gram: GramSolver, seed: int, max_iter: int
) -> DualNorm:
    rng = np.random.default_rng(seed)
    start = gram.solve(g)
    start = start + 1e-6 * np.linalg.norm(start) * rng.standard_normal(start.size)
    v = _normalized(start, kernel)
    value = float(g @ v)
    if value < 0.0:
        v, value = -v, -value
    step = 1.0
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):  # noqa: B007
        direction = gram.solve(g - value * energy_gradient(v, kernel))
        improved = False
        while step > 1e-16:
            trial = _normalized(v + step * direction, kernel)
            trial_value = float(g @ trial)
            if trial_value > value:
                improved = True
                break
            step *= 0.5
        if not improved:
            converged = True
            break
        gain = trial_value - value
        v, value = trial, trial_value
        step = min(step * 2.0, 1.0)
        if gain <= DUAL_NORM_TOL * abs(value):
            converged = True
            break
    if not converged:
        logger.warning(
            f"dual_norm ascent stopped after {iterations} iterations; lower bound {value:.6g}"
        )
    return DualNorm(
        value=value, converged=converged, iterations=iterations, method="ascent"
    )


def dual_norm_by_ascent(
    F: FloatArray, kernel: KernelMatrix, seed: int = DEFAULT_SEED
) -> DualNorm:
    """Ascent estimate for any p, used to cross-check the p = 2 Gram value."""
    g = kernel.cell_weight * np.asarray(F, dtype=float)
    if not np.any(g):
        return DualNorm(value=0.0)
    return _dual_norm_ascent(g, kernel, GramSolver(kernel), seed, DUAL_NORM_MAX_ITER)


def embedding_constant(
    q: float,
    kernel: KernelMatrix,
    seed: int = DEFAULT_SEED,
    starts: int = 4,
    max_iter: int = 400,
) -> float:
    """
    Empirical sup of |u|_q / ‖u‖ by projected ascent on the unit sphere of E.

    Deterministic for a given seed; the largest value over the starts is
    returned.
    """
    domain = kernel.domain
    w = domain.cell_weight
    gram = GramSolver(kernel)
    rng = np.random.default_rng(seed)

    def lq(v: FloatArray) -> float:
        return float((w * np.sum(np.abs(v) ** q)) ** (1.0 / q))

    initial = [gram.solve(w * np.ones(domain.n))]
    initial += [rng.standard_normal(domain.n) for _ in range(starts - 1)]
    best = 0.0
    for start in initial:
        v = _normalized(start, kernel)
        value = lq(v)
        step = 1.0
        for _ in range(max_iter):
            lq_grad = value ** (1.0 - q) * w * phi(v, q)
            direction = gram.solve(lq_grad - value * energy_gradient(v, kernel))
            while step > 1e-16:
                trial = _normalized(v + step * direction, kernel)
                trial_value = lq(trial)
                if trial_value > value:
                    break
                step *= 0.5
            else:
                break
            gain = trial_value - value
            v, value = trial, trial_value
            step = min(2.0 * step, 1.0)
            if gain <= 1e-13 * value:
                break
        best = max(best, value)
    logger.debug(f"Embedding constant q={q}: {best:.6g}")
    return best


def truncation_slack(v: VectorLike, kernel: KernelMatrix) -> tuple[float, float]:
    """
    Slack of ⟨A(v), v₊⟩ ≥ E(v₊), globally and pair by pair.

    Returns:
        (global slack, smallest pairwise slack of φ_p(v_i − v_j)(v₊ᵢ − v₊ⱼ) − |v₊ᵢ − v₊ⱼ|^p)
    """
    values = as_values(v)
    positive = np.maximum(values, 0.0)
    global_slack = float(energy_gradient(values, kernel) @ positive) - energy(
        positive, kernel
    )
    diff = values[:, None] - values[None, :]
    positive_diff = positive[:, None] - positive[None, :]
    pairwise = phi(diff, kernel.p) * positive_diff - np.abs(positive_diff) ** kernel.p
    return global_slack, float(np.min(pairwise))


def picone_slack(w: FloatArray, e: FloatArray, eps: float, p: float) -> float:
    """
    Smallest pairwise slack of the discrete Picone inequality

        |e_i − e_j|^p − φ_p(w_i − w_j)[e_i^p/(w_i + ε)^{p−1} − e_j^p/(w_j + ε)^{p−1}] ≥ 0.
    """
    w = np.asarray(w, dtype=float)
    e = np.asarray(e, dtype=float)
    ratio = e**p / (w + eps) ** (p - 1.0)
    lhs = phi(w[:, None] - w[None, :], p) * (ratio[:, None] - ratio[None, :])
    rhs = np.abs(e[:, None] - e[None, :]) ** p
    return float(np.min(rhs - lhs))
