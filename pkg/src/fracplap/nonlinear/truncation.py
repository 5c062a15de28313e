"""
Modified nonlinearity for small solutions.

F̃ = ηF + (1 − η)γ|t|^p with η an even C² cutoff equal to 1 on [−t2, t2]
and 0 outside [−2t2, 2t2]. The transition is the quintic smoothstep, so
|η′|_∞ = 1.875/t2 and η′(t)t ≤ 0.
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel

from fracplap.core.constants import (
    GAMMA_FRACTION,
    HYPOTHESIS_T_MIN,
    HYPOTHESIS_T_POINTS,
)
from fracplap.core.errors import ValidationError
from fracplap.core.logging_config import get_logger
from fracplap.discretization.gagliardo import (
    KernelMatrix,
    embedding_constant,
    energy,
    energy_gradient,
    hessian,
    phi,
    phi_derivative,
)
from fracplap.discretization.grid import GridFunction, as_values
from fracplap.nonlinear.models import RHSSpec, TruncationSpec
from fracplap.nonlinear.rhs import NodalRHS, evaluate_rhs

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]

ETA_SLOPE = 1.875  # max of the smoothstep derivative 30τ²(1 − τ)²


def _tau(t: FloatArray, t2: float) -> FloatArray:
    return np.clip((np.abs(t) - t2) / t2, 0.0, 1.0)


def eta(t: FloatArray, t2: float) -> FloatArray:
    tau = _tau(t, t2)
    return 1.0 - tau**3 * (10.0 - 15.0 * tau + 6.0 * tau**2)


def eta_prime(t: FloatArray, t2: float) -> FloatArray:
    tau = _tau(t, t2)
    return -30.0 * tau**2 * (1.0 - tau) ** 2 * np.sign(t) / t2


def eta_second(t: FloatArray, t2: float) -> FloatArray:
    tau = _tau(t, t2)
    return -60.0 * tau * (1.0 - tau) * (1.0 - 2.0 * tau) / t2**2


def growth_constant(t2: float, gamma: float, p: float, q_min: float) -> float:
    """C₁ = 2t₂|η′|_∞/min q_i + 1 + 2t₂γ|η′|_∞ + pγ."""
    slope = ETA_SLOPE / t2
    return 2.0 * t2 * slope / q_min + 1.0 + 2.0 * t2 * gamma * slope + p * gamma


class TruncationChecks(BaseModel):
    """Sampled properties of the modified nonlinearity."""

    identity_inner: bool  # f̃ = f on |t| ≤ t2
    identity_outer: bool  # f̃ = pγφ_p on |t| ≥ 2t2
    odd: bool
    sign_inequality: bool  # pF̃ − f̃t ≥ 0
    zero_set: bool  # pF̃ − f̃t = 0 only at t = 0 or |t| ≥ 2t2
    growth_bound: bool  # |f̃| ≤ C₁[Σ|h_i||t|^{q_i−1} + |t|^{p−1}]

    @property
    def all_hold(self) -> bool:
        return all(self.model_dump().values())


@dataclass(frozen=True)
class Truncation:
    """f̃, F̃ and ∂f̃/∂t bound to the nodes of one grid."""

    nodal: NodalRHS
    t1: float
    t2: float
    gamma: float
    p: float
    growth: float  # C₁
    embedding: float  # C with |u|_p ≤ C‖u‖

    def F(self, t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=float)
        cut = eta(t, self.t2)
        return cut * self.nodal.F(t) + (1.0 - cut) * (self.gamma * np.abs(t) ** self.p)

    def f(self, t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=float)
        cut = eta(t, self.t2)
        slope = eta_prime(t, self.t2)
        power = np.abs(t) ** self.p
        return (
            slope * self.nodal.F(t)
            + cut * self.nodal.f(t)
            - self.gamma * slope * power
            + (1.0 - cut) * (self.p * self.gamma * phi(t, self.p))
        )

    def df(self, t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=float)
        cut = eta(t, self.t2)
        slope = eta_prime(t, self.t2)
        curvature = eta_second(t, self.t2)
        pg = self.p * self.gamma
        return (
            curvature * self.nodal.F(t)
            + 2.0 * slope * self.nodal.f(t)
            + cut * self.nodal.df(t)
            - self.gamma * curvature * np.abs(t) ** self.p
            - 2.0 * pg * slope * phi(t, self.p)
            + (1.0 - cut) * pg * phi_derivative(t, self.p)
        )

    def outer(self, t: FloatArray) -> FloatArray:
        """pγφ_p(t), the value of f̃ for |t| ≥ 2t2."""
        return self.p * self.gamma * phi(np.asarray(t, dtype=float), self.p)


def modified_energy(
    u: GridFunction | FloatArray, truncation: Truncation, kernel: KernelMatrix
) -> float:
    """Φ̃(u) = (1/p)E(u) − ∫F̃(x, u)."""
    values = as_values(u)
    return energy(values, kernel) / kernel.p - kernel.cell_weight * float(
        np.sum(truncation.F(values))
    )


def modified_gradient(u: FloatArray, truncation: Truncation, kernel: KernelMatrix) -> FloatArray:
    return energy_gradient(u, kernel) - kernel.cell_weight * truncation.f(u)


def modified_hessian(u: FloatArray, truncation: Truncation, kernel: KernelMatrix) -> FloatArray:
    return hessian(u, kernel) - kernel.cell_weight * np.diag(truncation.df(u))


def sampling_grid(upper: float, lower: float = HYPOTHESIS_T_MIN) -> FloatArray:
    """Symmetric log-spaced levels ±t with lower ≤ t ≤ upper, plus 0."""
    positive = np.geomspace(lower, upper, HYPOTHESIS_T_POINTS)
    return np.concatenate([-positive[::-1], [0.0], positive])


def check_truncation(truncation: Truncation) -> TruncationChecks:
    """Evaluate the truncation identities and inequalities on a (t, x) grid."""
    t2 = truncation.t2
    levels = np.unique(
        np.concatenate([sampling_grid(8.0 * t2), np.linspace(-3.0 * t2, 3.0 * t2, 601)])
    )
    grid = levels[:, None] * np.ones(truncation.nodal.terms[0].scale.size)
    f_tilde = truncation.f(grid)
    F_tilde = truncation.F(grid)
    magnitude = np.abs(grid)
    inner = magnitude <= t2
    outer = magnitude >= 2.0 * t2
    identity_inner = bool(np.array_equal(f_tilde[inner], truncation.nodal.f(grid)[inner]))
    identity_outer = bool(np.array_equal(f_tilde[outer], truncation.outer(grid)[outer]))
    odd = bool(np.array_equal(truncation.f(-grid), -f_tilde))
    gap = truncation.p * F_tilde - f_tilde * grid
    scale = truncation.p * (np.abs(F_tilde) + truncation.gamma * magnitude**truncation.p)
    roundoff = 1e-12 * scale
    sign_inequality = bool(np.all(gap >= -roundoff))
    transition = (magnitude > 0.0) & ~outer
    zero_set = bool(np.all(gap[transition] > roundoff[transition]))
    bound = truncation.growth * (
        sum(scales * magnitude ** (q - 1.0) for scales, q in truncation.nodal.growth_scales)
        + magnitude ** (truncation.p - 1.0)
    )
    growth_bound = bool(np.all(np.abs(f_tilde) <= bound * (1.0 + 1e-12)))
    return TruncationChecks(
        identity_inner=identity_inner,
        identity_outer=identity_outer,
        odd=odd,
        sign_inequality=sign_inequality,
        zero_set=zero_set,
        growth_bound=growth_bound,
    )


def build_truncation(
    rhs: RHSSpec,
    spec: TruncationSpec,
    kernel: KernelMatrix,
    embedding: float | None = None,
) -> Truncation:
    """
    Construct the modified nonlinearity f̃ and its primitive F̃.

    Args:
        rhs: Odd right-hand side without forcing
        spec: Cutoff levels t1, t2 and optionally γ
        kernel: Discrete energy; fixes the grid and the embedding constant
        embedding: Measured |u|_p/‖u‖ bound, computed when omitted

    Raises:
        ValidationError: If f is not odd, if F(x, t) < |t|^p somewhere on the
            sampled range 0 < |t| < t1, or if γ is outside (0, min{1, 1/(pC^p)})
    """
    if not rhs.terms:
        raise ValidationError("build_truncation needs at least one power term")
    if rhs.forcing is not None or not all(term.odd for term in rhs.terms):
        raise ValidationError("(F6) violated: the right-hand side must be odd in t near 0")
    p = kernel.p
    nodal = evaluate_rhs(rhs, kernel.domain, p)
    levels = np.geomspace(HYPOTHESIS_T_MIN, spec.t1, HYPOTHESIS_T_POINTS, endpoint=False)
    primitive = nodal.F(levels[:, None] * np.ones(kernel.n))
    shortfall = primitive < (levels**p)[:, None]
    if np.any(shortfall):
        worst = float(levels[np.flatnonzero(shortfall.any(axis=1))[0]])
        raise ValidationError(
            f"(F5) consequence F(x,t) >= |t|^p fails for |t| < t1={spec.t1:.6g} at t={worst:.3g}"
        )
    if embedding is None:
        embedding = embedding_constant(p, kernel)
    upper = min(1.0, 1.0 / (p * embedding**p))
    gamma = spec.gamma if spec.gamma is not None else GAMMA_FRACTION * upper
    if not 0.0 < gamma < upper:
        raise ValidationError(
            f"γ must satisfy 0 < γ < min(1, 1/(p·C^p)) = {upper:.6g}, got γ={gamma}"
        )
    t2 = spec.cutoff
    truncation = Truncation(
        nodal=nodal,
        t1=spec.t1,
        t2=t2,
        gamma=gamma,
        p=p,
        growth=growth_constant(t2, gamma, p, min(term.q for term in rhs.terms)),
        embedding=embedding,
    )
    logger.debug(
        f"Truncation t1={spec.t1:.6g}, t2={t2:.6g}, γ={gamma:.6g}, C₁={truncation.growth:.6g}"
    )
    return truncation
