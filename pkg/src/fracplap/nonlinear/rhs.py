"""
Nodal evaluation of right-hand sides and of the associated functional.

All functions of t act elementwise on arrays whose last axis runs over the
grid nodes, so the same code serves solver iterates (shape (n,)) and
hypothesis sampling grids (shape (m, n)).
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from fracplap.core.errors import ValidationError
from fracplap.discretization.gagliardo import (
    KernelMatrix,
    apply_A,
    dual_norm,
    energy,
    energy_gradient,
    hessian,
    phi,
    phi_derivative,
)
from fracplap.discretization.grid import Domain1D, GridFunction, as_values
from fracplap.nonlinear.models import RHSSpec
from fracplap.weights.models import weight_values

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class NodalTerm:
    scale: FloatArray  # coef·h_i at the nodes
    q: float
    odd: bool

    def f(self, t: FloatArray) -> FloatArray:
        if self.odd:
            return self.scale * phi(t, self.q)
        return self.scale * np.abs(t) ** (self.q - 1.0)

    def F(self, t: FloatArray) -> FloatArray:
        magnitude = np.abs(t) ** self.q / self.q
        if self.odd:
            return self.scale * magnitude
        return self.scale * np.sign(t) * magnitude

    def df(self, t: FloatArray) -> FloatArray:
        slope = phi_derivative(t, self.q)
        if self.odd:
            return self.scale * slope
        return self.scale * np.sign(t) * slope


@dataclass(frozen=True)
class NodalRHS:
    """f(x, t), its primitive F and ∂f/∂t at the nodes of one grid."""

    terms: tuple[NodalTerm, ...]
    p: float
    coupling: FloatArray | None = None  # λ·h
    forcing: FloatArray | None = None

    def f(self, t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        for term in self.terms:
            total = total + term.f(t)
        if self.coupling is not None:
            total = total + self.coupling * phi(t, self.p)
        if self.forcing is not None:
            total = total + self.forcing
        return total

    def F(self, t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        for term in self.terms:
            total = total + term.F(t)
        if self.coupling is not None:
            total = total + self.coupling * np.abs(t) ** self.p / self.p
        if self.forcing is not None:
            total = total + self.forcing * t
        return total

    def df(self, t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        for term in self.terms:
            total = total + term.df(t)
        if self.coupling is not None:
            total = total + self.coupling * phi_derivative(t, self.p)
        return total

    @property
    def growth_scales(self) -> list[tuple[FloatArray, float]]:
        """(|coef·h_i|, q_i) pairs of the growth bound Σ|h_i||t|^{q_i−1}."""
        return [(np.abs(term.scale), term.q) for term in self.terms]


def evaluate_rhs(rhs: RHSSpec, domain: Domain1D, p: float) -> NodalRHS:
    """
    Bind a right-hand side to the nodes of a grid.

    Raises:
        ValidationError: If the forcing lives on a different grid
    """
    terms = tuple(
        NodalTerm(scale=term.coef * weight_values(term.weight, domain), q=term.q, odd=term.odd)
        for term in rhs.terms
    )
    coupling = None
    if rhs.lambda_coupling is not None:
        coupling = rhs.lambda_coupling.lam * weight_values(rhs.lambda_coupling.weight, domain)
    forcing = None
    if rhs.forcing is not None:
        if rhs.forcing.domain != domain:
            raise ValidationError("Forcing vector lives on a different grid than the operator")
        forcing = np.asarray(rhs.forcing.values, dtype=float)
    return NodalRHS(terms=terms, p=p, coupling=coupling, forcing=forcing)


def functional(u: FloatArray, nodal: NodalRHS, kernel: KernelMatrix) -> float:
    """Φ(u) = (1/p)E(u) − ∫F(x, u)."""
    return energy(u, kernel) / kernel.p - kernel.cell_weight * float(np.sum(nodal.F(u)))


def functional_gradient(u: FloatArray, nodal: NodalRHS, kernel: KernelMatrix) -> FloatArray:
    """Euclidean gradient of Φ, i.e. w·(A(u) − f(·, u))."""
    return energy_gradient(u, kernel) - kernel.cell_weight * nodal.f(u)


def functional_hessian(u: FloatArray, nodal: NodalRHS, kernel: KernelMatrix) -> FloatArray:
    return hessian(u, kernel) - kernel.cell_weight * np.diag(nodal.df(u))


def residual(
    u: GridFunction | FloatArray, rhs: RHSSpec | NodalRHS, kernel: KernelMatrix
) -> tuple[FloatArray, float]:
    """
    Defect A(u) − f(·, u) as a dual vector and its dual norm.

    Raises:
        ValidationError: If u does not have kernel.n values
    """
    values = as_values(u)
    if values.shape != (kernel.n,):
        raise ValidationError(f"residual: u has {values.size} values, kernel has n={kernel.n}")
    nodal = rhs if isinstance(rhs, NodalRHS) else evaluate_rhs(rhs, kernel.domain, kernel.p)
    defect = apply_A(values, kernel) - nodal.f(values)
    return defect, dual_norm(defect, kernel).value
