"""Branch and bifurcation report models."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fracplap.discretization.grid import GridFunction


class BranchStatus(str, Enum):
    """Why a continuation run stopped."""

    MAX_STEPS = "max_steps"
    MAX_NORM = "max_norm"  # ‖u‖ left the box
    LAMBDA_BOUND = "lambda_bound"  # λ left [0, factor·λ₂]
    MIN_STEP = "min_step"  # corrector failed down to the smallest step


class BranchPoint(BaseModel):
    """(λ, u) on a solution branch."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda")
    u: GridFunction
    norm: float = Field(ge=0.0, description="‖u‖ = E(u)^{1/p}")
    residual: float = Field(ge=0.0)
    step: float = Field(default=0.0, ge=0.0, description="E-distance to the previous point")

    def row(self) -> dict[str, float]:
        return {
            "lambda": self.lam,
            "norm": self.norm,
            "sup_norm": self.u.sup_norm,
            "residual": self.residual,
        }


class Branch(BaseModel):
    """Ordered continuation points with the nominal arclength step."""

    points: list[BranchPoint]
    step: float = Field(gt=0.0, description="Nominal arclength increment in the E-norm")
    status: BranchStatus = BranchStatus.MAX_STEPS

    @model_validator(mode="after")
    def _check_spacing(self) -> "Branch":
        low, high = 0.5 * self.step * (1.0 - 1e-9), 2.0 * self.step * (1.0 + 1e-9)
        for index, point in enumerate(self.points[1:], start=1):
            if not low <= point.step <= high:
                raise ValueError(
                    f"Branch point {index} lies {point.step:.3g} from its predecessor, "
                    f"outside [step/2, 2·step] for step={self.step:.3g}"
                )
        return self

    @property
    def lambdas(self) -> list[float]:
        return [point.lam for point in self.points]

    @property
    def norms(self) -> list[float]:
        return [point.norm for point in self.points]


class BifurcationReport(BaseModel):
    """Extrapolation of λ(‖u‖) to ‖u‖ = 0 compared with λ₁."""

    lambda1: float
    lambda0: float | None = None
    relative_deviation: float | None = Field(default=None, description="|λ₀ − λ₁|/λ₁")
    slope: float | None = None
    points_used: int = 0
    conclusive: bool = False
    diagnostic: str = ""
