"""Result and option models of the eigenvalue solvers."""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from fracplap.core.constants import (
    DEFAULT_MAX_ITER,
    DEFAULT_SEED,
    DEFAULT_STEP0,
    DEFAULT_TOL,
)
from fracplap.discretization.grid import GridFunction


class SolverOptions(BaseModel):
    """Tolerance, iteration cap, initial step and seed shared by all solvers."""

    model_config = ConfigDict(frozen=True)

    tol: float = Field(default=DEFAULT_TOL, gt=0.0, description="Residual tolerance")
    max_iter: int = Field(default=DEFAULT_MAX_ITER, ge=1, description="Iteration cap")
    step0: float = Field(default=DEFAULT_STEP0, gt=0.0, description="Initial step")
    seed: int = Field(default=DEFAULT_SEED, description="Seed of every random start")


class EigenPair(BaseModel):
    """(λ, u) with ∫h|u|^p = 1 and the dual norm of A(u) − λhφ_p(u)."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda", description="Eigenvalue")
    u: GridFunction = Field(description="Eigenfunction")
    residual: float = Field(ge=0.0)
    normalization: float = Field(description="∫h|u|^p, target 1")
    iterations: int = Field(default=0, ge=0)

    def summary(self) -> dict[str, float]:
        return {
            "lambda": self.lam,
            "residual": self.residual,
            "normalization": self.normalization,
        }


class OddPath(BaseModel):
    """Closed discrete loop with points[k + m/2] = −points[k]."""

    model_config = ConfigDict(frozen=True)

    points: list[GridFunction]

    @model_validator(mode="after")
    def _check_odd(self) -> "OddPath":
        m = len(self.points)
        if m < 4 or m % 2:
            raise ValueError(f"An odd path needs an even number m >= 4 of points, got {m}")
        half = m // 2
        for k in range(half):
            if not np.array_equal(self.points[k + half].values, -self.points[k].values):
                raise ValueError(f"Odd symmetry broken at point {k}")
        return self

    @property
    def m(self) -> int:
        return len(self.points)

    @classmethod
    def from_half(cls, half: list[GridFunction]) -> "OddPath":
        """Mirror m/2 points into a full odd loop."""
        return cls(points=list(half) + [-point for point in half])


class SecondEigenResult(BaseModel):
    """Minimax value along the relaxed odd path and the path itself."""

    lambda2: float
    path: OddPath
    max_index: int = Field(description="Index of the maximizing point")
    iterations: int
    converged: bool

    @property
    def maximizer(self) -> GridFunction:
        return self.path.points[self.max_index]


class SimplicityReport(BaseModel):
    """Agreement of repeated first-eigenfunction runs."""

    simple: bool | None = Field(description="None when some trial failed")
    trials: int
    max_distance: float = Field(description="Largest 1 − |cos| between trial minimizers")
    lambdas: list[float] = Field(default_factory=list)
