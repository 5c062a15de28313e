"""Right-hand sides, truncation parameters and solution records."""

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fracplap.discretization.grid import GridFunction
from fracplap.weights.models import WeightSpec


class RHSTerm(BaseModel):
    """coef·h(x)·|t|^{q−2}t when odd, coef·h(x)·|t|^{q−1} otherwise."""

    model_config = ConfigDict(frozen=True)

    coef: float = Field(description="Scalar coefficient")
    weight: WeightSpec = Field(default_factory=WeightSpec.constant, description="Weight h_i")
    q: float = Field(gt=1.0, description="Growth exponent q_i")
    odd: bool = Field(default=True, description="Odd in t")


class LambdaCoupling(BaseModel):
    """The eigenvalue term λh(x)φ_p(t)."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(default=0.0, alias="lambda")
    weight: WeightSpec = Field(default_factory=WeightSpec.constant)


class RHSSpec(BaseModel):
    """f(x, t) as a sum of power terms, an optional λ-coupling and a forcing."""

    model_config = ConfigDict(frozen=True)

    terms: list[RHSTerm] = Field(default_factory=list)
    lambda_coupling: LambdaCoupling | None = None
    forcing: GridFunction | None = Field(default=None, description="Dual vector f(x)")

    def with_lambda(self, lam: float) -> "RHSSpec":
        """Copy with the coupling parameter set to lam."""
        coupling = self.lambda_coupling or LambdaCoupling()
        return self.model_copy(update={"lambda_coupling": coupling.model_copy(update={"lam": lam})})

    def without_coupling(self) -> "RHSSpec":
        return self.model_copy(update={"lambda_coupling": None})

    @property
    def is_odd(self) -> bool:
        return self.forcing is None and all(term.odd for term in self.terms)


class TruncationSpec(BaseModel):
    """
    Cutoff levels of the modified nonlinearity.

    t2 defaults to t1/4; γ defaults to half of its admissible upper bound
    min{1, 1/(p·C^p)} with C the measured L^p embedding constant.
    """

    model_config = ConfigDict(frozen=True)

    t1: float = Field(gt=0.0, description="Level below which f is odd and F ≥ |t|^p")
    t2: float | None = Field(default=None, gt=0.0, description="Cutoff level, t2 < t1/2")
    t0: float = Field(default=math.inf, gt=0.0, description="Level of the sign condition")
    gamma: float | None = Field(default=None, gt=0.0, description="Weight of γ|t|^p")

    @model_validator(mode="after")
    def _check_order(self) -> "TruncationSpec":
        if not self.t1 < self.t0:
            raise ValueError(f"Truncation requires t1 < t0, got t1={self.t1}, t0={self.t0}")
        if self.t2 is not None and not self.t2 < 0.5 * self.t1:
            raise ValueError(f"Truncation requires 0 < t2 < t1/2, got t2={self.t2}, t1={self.t1}")
        return self

    @property
    def cutoff(self) -> float:
        return self.t2 if self.t2 is not None else 0.25 * self.t1


class Solution(BaseModel):
    """A discrete weak solution with its residual and functional value."""

    model_config = ConfigDict(frozen=True)

    u: GridFunction
    residual: float = Field(ge=0.0, description="Dual norm of the defect")
    energy: float = Field(description="Value of the governing functional")
    lam: float | None = Field(default=None, description="λ of the Fredholm problem")
    method: str = Field(default="", description="Solver that produced the solution")
    level: int | None = Field(default=None, description="Subspace level of a small solution")
    untruncated_residual: float | None = Field(
        default=None, description="Residual for the original nonlinearity"
    )
    solves_original: bool | None = Field(
        default=None, description="Untruncated residual below the solver tolerance"
    )

    def summary(self) -> dict[str, float]:
        return {
            "energy": self.energy,
            "residual": self.residual,
            "sup_norm": self.u.sup_norm,
        }


class Hypothesis(str, Enum):
    """Structural conditions on the nonlinearity."""

    F1 = "F1"  # growth bound with weights of class W̃_{q_i}
    F2 = "F2"  # bifurcation growth, q_i ∈ (p, p_s*) with weights of class W_{q_i}
    F3 = "F3"  # f/φ_p(t) → 0 as t → 0
    F4 = "F4"  # pF − ft > 0 for 0 < |t| < t0
    F5 = "F5"  # f/φ_p(t) → ∞ as t → 0
    F6 = "F6"  # odd in t near 0


class HypothesisReport(BaseModel):
    """Outcome of one hypothesis check."""

    which: Hypothesis
    holds: bool
    violations: list[str] = Field(default_factory=list)
    t0: float | None = Field(default=None, description="Largest sampled level of (F4)")
    t1: float | None = Field(default=None, description="Admissible t1 from the (F5)/(F6) scan")
    ratio_slope: float | None = Field(
        default=None, description="Log-log slope of |f|/|t|^{p−1} near 0"
    )
