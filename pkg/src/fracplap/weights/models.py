"""
Weight and class-report models.

This module defines the parameter sets of the fractional Sobolev setting, the
weight specification shared by classifiers and solvers, and the reports the
classifiers return.
"""

import math
from enum import Enum

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

from fracplap.discretization.grid import (
    Domain1D,
    GridFunction,
    distance_to_boundary,
)


class WeightKind(str, Enum):
    """How a weight is given."""

    POWER = "power"  # (1 − |x|)^{−β} on the unit ball, ρ^{−β} on a 1-D grid
    TABULATED = "tabulated"  # nodal values on a 1-D grid


class WeightClass(str, Enum):
    """Integrability classes a weight can be tested against."""

    AR = "Ar"  # h ∈ L^r for some r > 1
    AQ = "Aq"  # h ∈ L^r with 1/r + q/p_s* < 1
    WQ = "Wq"  # hρ^{sa} ∈ L^r with 1/r + a/p + (q − a)/p_s* < 1, a ∈ [0, q)
    TILDE_WQ = "tildeWq"  # as Wq with max{p, q} in place of q, a ∈ [0, 1]
    CONTINUITY = "continuity"  # h ∈ L^r with 1/r + max{p, q}/p_s* < 1
    LORENTZ = "lorentz"  # h ∈ L^{p0, q0}


class Verdict(str, Enum):
    """Outcome of a membership test."""

    MEMBER = "member"
    NOT_MEMBER = "not_member"
    INCONCLUSIVE = "inconclusive"  # numeric evidence is ambiguous


class SpaceParams(BaseModel):
    """Dimension, integrability p, smoothness s and growth exponent q."""

    model_config = ConfigDict(frozen=True)

    N: int = Field(default=1, ge=1, description="Ambient dimension")
    p: float = Field(gt=1.0, description="Integrability exponent of the operator")
    s: float = Field(gt=0.0, le=1.0, description="Fractional order")
    q: float = Field(default=2.0, ge=1.0, description="Growth exponent of the term")

    @property
    def critical(self) -> float:
        if self.s * self.p < self.N:
            return self.N * self.p / (self.N - self.s * self.p)
        return math.inf

    def inverse_critical(self) -> float:
        """1/p_s*, zero when p_s* is infinite."""
        critical = self.critical
        return 0.0 if math.isinf(critical) else 1.0 / critical


class WeightSpec(BaseModel):
    """A power weight or a tabulated weight."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: WeightKind = Field(default=WeightKind.POWER, description="Weight family")
    beta: float = Field(default=0.0, ge=0.0, description="Singularity exponent β")
    dimension: int = Field(
        default=3, ge=1, description="Ball dimension for closed-form rearrangements"
    )
    negative_region: tuple[float, float] | None = Field(
        default=None, description="Interval of the 1-D grid where the weight is negated"
    )
    table: GridFunction | None = Field(
        default=None, description="Nodal values for tabulated weights"
    )

    @model_validator(mode="after")
    def _check_kind(self) -> "WeightSpec":
        if self.kind == WeightKind.TABULATED:
            if self.table is None:
                raise ValueError("Tabulated weight requires a table of nodal values")
            if not np.all(np.isfinite(self.table.values)):
                raise ValueError("Tabulated weight values must be finite at nodes")
        if self.negative_region is not None:
            lo, hi = self.negative_region
            if not lo < hi:
                raise ValueError("negative_region must satisfy lo < hi")
        return self

    @classmethod
    def power(cls, beta: float, **kwargs: object) -> "WeightSpec":
        return cls(kind=WeightKind.POWER, beta=beta, **kwargs)  # type: ignore[arg-type]

    @classmethod
    def constant(cls) -> "WeightSpec":
        return cls(kind=WeightKind.POWER, beta=0.0)

    @classmethod
    def tabulated(cls, table: GridFunction) -> "WeightSpec":
        return cls(kind=WeightKind.TABULATED, table=table)


def weight_values(weight: WeightSpec, domain: Domain1D) -> npt.NDArray[np.float64]:
    """
    Nodal values of a weight on a 1-D solver grid.

    Power weights become ρ(x)^{−β} with ρ the distance to the boundary;
    the optional negative region flips the sign there.
    """
    if weight.kind == WeightKind.TABULATED:
        assert weight.table is not None
        if (weight.table.domain.left, weight.table.domain.right, weight.table.domain.n) != (
            domain.left,
            domain.right,
            domain.n,
        ):
            raise ValueError("Tabulated weight lives on a different grid")
        values = np.array(weight.table.values, dtype=float)
    else:
        values = distance_to_boundary(domain) ** (-weight.beta)
    if weight.negative_region is not None:
        lo, hi = weight.negative_region
        mask = (domain.nodes >= lo) & (domain.nodes <= hi)
        values = np.where(mask, -values, values)
    return values


class Witness(BaseModel):
    """Exponent pair (a, r) certifying a class membership."""

    a: float = Field(description="Power of ρ^{s a} multiplying the weight")
    r: float = Field(description="Lebesgue exponent")


class ClassReport(BaseModel):
    """Membership verdict with the witness that certifies it."""

    weight_class: WeightClass = Field(description="Class tested")
    member: bool = Field(description="True only when a witness with positive margin exists")
    witness: Witness | None = Field(default=None, description="Certifying (a, r)")
    margin: float = Field(
        default=0.0, description="Smallest slack among the witness inequalities"
    )
    in_Ar: bool | None = Field(default=None, description="h ∈ L^r for some r > 1")
    r_max: float | None = Field(
        default=None, description="Largest verified r (supremum for power weights)"
    )
    in_Aq: bool | None = Field(default=None)
    in_Wq: bool | None = Field(default=None)
    in_tildeWq: bool | None = Field(default=None)
    in_continuity: bool | None = Field(default=None)
    diagnostic: str = Field(default="", description="Human-readable reasoning")

    def to_cli_dict(self) -> dict[str, object]:
        return {
            "class": self.weight_class.value,
            "member": self.member,
            "witness_a": None if self.witness is None else self.witness.a,
            "witness_r": None if self.witness is None else self.witness.r,
            "margin": self.margin,
        }


class LorentzParams(BaseModel):
    """Exponents (p0, q0) of the Lorentz space L^{p0, q0}."""

    model_config = ConfigDict(frozen=True)

    p0: float = Field(gt=1.0)
    q0: float = Field(gt=1.0)


class LorentzReport(BaseModel):
    """Lorentz membership verdict and the refinement evidence behind it."""

    verdict: Verdict
    member: bool | None = Field(description="None when inconclusive")
    method: str = Field(description="'analytic' or 'numeric'")
    integrals: list[float] = Field(default_factory=list)
    diagnostic: str = Field(default="")

    def to_cli_dict(self) -> dict[str, object]:
        return {
            "class": WeightClass.LORENTZ.value,
            "member": self.member,
            "verdict": self.verdict.value,
            "method": self.method,
            "witness_a": None,
            "witness_r": None,
            "margin": None,
        }
