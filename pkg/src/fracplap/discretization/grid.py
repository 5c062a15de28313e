"""
Uniform 1-D grids, boundary distance and midpoint quadrature.

Nodes are the n interior points of a uniform partition of (left, right) into
n + 1 cells of width (right − left)/(n + 1). Every grid function is
implicitly extended by zero outside the interval.
"""

from typing import Any

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fracplap.core.errors import ValidationError

FloatArray = npt.NDArray[np.float64]


class Domain1D(BaseModel):
    """Interval (left, right) with n uniformly spaced interior nodes."""

    model_config = ConfigDict(frozen=True)

    left: float = Field(description="Left endpoint of the interval")
    right: float = Field(description="Right endpoint of the interval")
    n: int = Field(description="Number of interior nodes")

    @model_validator(mode="after")
    def _check_interval(self) -> "Domain1D":
        if not self.left < self.right:
            raise ValueError(
                f"Domain requires left < right, got left={self.left}, right={self.right}"
            )
        if self.n < 2:
            raise ValueError(f"Domain requires n >= 2 interior nodes, got n={self.n}")
        return self

    @property
    def cell_weight(self) -> float:
        return (self.right - self.left) / (self.n + 1)

    @property
    def nodes(self) -> FloatArray:
        return self.left + self.cell_weight * np.arange(1, self.n + 1, dtype=float)

    @property
    def length(self) -> float:
        return self.right - self.left

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.left + self.right)

    def reflect(self, values: FloatArray) -> FloatArray:
        """Values of x ↦ u(left + right − x) on the same nodes."""
        return np.asarray(values, dtype=float)[::-1].copy()


class GridFunction(BaseModel):
    """Nodal values of a function on a Domain1D."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    domain: Domain1D = Field(description="Grid the values live on")
    values: Any = Field(description="Real vector of length domain.n")

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, value: Any) -> FloatArray:
        array = np.array(value, dtype=float).reshape(-1)
        array.flags.writeable = False
        return array

    @model_validator(mode="after")
    def _check_length(self) -> "GridFunction":
        if self.values.shape[0] != self.domain.n:
            raise ValueError(
                f"GridFunction has {self.values.shape[0]} values, domain has n={self.domain.n}"
            )
        return self

    def with_values(self, values: FloatArray) -> "GridFunction":
        return GridFunction(domain=self.domain, values=values)

    def __neg__(self) -> "GridFunction":
        return self.with_values(-self.values)

    def scaled(self, factor: float) -> "GridFunction":
        return self.with_values(factor * self.values)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def as_values(u: "GridFunction | FloatArray | list[float]") -> FloatArray:
    """Nodal vector of a GridFunction or array-like."""
    if isinstance(u, GridFunction):
        return np.asarray(u.values, dtype=float)
    return np.asarray(u, dtype=float)


def build_grid(left: float, right: float, n: int) -> Domain1D:
    """
    Build a uniform interior-node grid.

    Args:
        left: Left endpoint
        right: Right endpoint, must exceed left
        n: Number of interior nodes, at least 2

    Returns:
        Domain1D with nodes left + i·(right − left)/(n + 1), i = 1..n

    Raises:
        ValidationError: If n < 2 or left >= right
    """
    if not left < right:
        raise ValidationError(f"build_grid requires left < right, got ({left}, {right})")
    if n < 2:
        raise ValidationError(f"build_grid requires n >= 2, got n={n}")
    return Domain1D(left=left, right=right, n=n)


def distance_to_boundary(domain: Domain1D) -> FloatArray:
    """ρ(x_i) = min(x_i − left, right − x_i) at every node."""
    nodes = domain.nodes
    return np.minimum(nodes - domain.left, domain.right - nodes)


def integrate(u: "GridFunction | FloatArray | list[float]", domain: Domain1D) -> float:
    """
    Midpoint-type quadrature Σ_i cell_weight · u_i.

    Raises:
        ValidationError: If the vector length differs from domain.n
    """
    values = as_values(u)
    if values.shape != (domain.n,):
        raise ValidationError(
            f"integrate: vector of length {values.size} does not match n={domain.n}"
        )
    return float(domain.cell_weight * np.sum(values))
