"""
Experiment configuration for fracplap.

One JSON document describes a run: the grid, the operator, the eigenvalue
weight, the right-hand side, solver options and one block per command.
Every cross-field constraint is validated before any computation and the
error message names the violated inequality.
"""

import hashlib
import json
import math
import os
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from fracplap.core.constants import (
    BRANCH_EPSILON,
    BRANCH_STEP,
    CONFIG_PATH_ENV,
    DEFAULT_MAX_ITER,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_SEED,
    DEFAULT_STEP0,
    DEFAULT_TOL,
    DEGIORGI_N_MAX,
    LOG_LEVEL_ENV,
    OUTPUT_DIR_ENV,
    PATH_POINTS,
)
from fracplap.core.errors import ValidationError
from fracplap.discretization.grid import Domain1D, GridFunction
from fracplap.nonlinear.models import (
    LambdaCoupling,
    RHSSpec,
    RHSTerm,
    TruncationSpec,
)
from fracplap.regularity.apriori import GrowthSpec, GrowthTerm
from fracplap.spectral.models import SolverOptions
from fracplap.weights.models import (
    LorentzParams,
    SpaceParams,
    WeightClass,
    WeightKind,
    WeightSpec,
)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)


class DomainConfig(_Section):
    """Interval and number of interior nodes."""

    left: float = Field(default=-1.0, description="Left endpoint")
    right: float = Field(default=1.0, description="Right endpoint")
    n: int = Field(default=64, ge=2, description="Interior nodes")

    @model_validator(mode="after")
    def _check_order(self) -> "DomainConfig":
        if not self.left < self.right:
            raise ValueError(f"left < right violated: left={self.left}, right={self.right}")
        return self

    def build(self) -> Domain1D:
        return Domain1D(left=self.left, right=self.right, n=self.n)


class OperatorConfig(_Section):
    """Exponents of the fractional p-Laplacian and the ambient dimension."""

    p: float = Field(default=2.0, gt=1.0, description="Integrability exponent, p > 1")
    s: float = Field(default=0.4, gt=0.0, le=1.0, description="Fractional order, 0 < s <= 1")
    N: int = Field(default=1, ge=1, description="Dimension; solver commands need N = 1")

    @model_validator(mode="after")
    def _check_subcritical(self) -> "OperatorConfig":
        if self.N == 1 and self.s * self.p >= 1.0:
            raise ValueError(f"s*p < 1 violated on the 1-D grid: s*p={self.s * self.p:.6g}")
        return self

    def space(self, q: float = 2.0) -> SpaceParams:
        return SpaceParams(N=self.N, p=self.p, s=self.s, q=q)


class WeightConfig(_Section):
    """Power weight ρ^{−β} or nodal values on the configured grid."""

    kind: WeightKind = Field(default=WeightKind.POWER)
    beta: float = Field(default=0.0, ge=0.0, description="Singularity exponent β")
    dimension: int = Field(default=3, ge=1, description="Ball dimension for rearrangements")
    negative_region: tuple[float, float] | None = Field(default=None)
    values: list[float] | None = Field(default=None, description="Tabulated nodal values")

    @model_validator(mode="after")
    def _check_table(self) -> "WeightConfig":
        if self.kind == WeightKind.TABULATED and self.values is None:
            raise ValueError("tabulated weight requires values")
        return self

    def build(self, domain: Domain1D) -> WeightSpec:
        if self.kind == WeightKind.TABULATED:
            table = GridFunction(domain=domain, values=np.asarray(self.values, dtype=float))
            return WeightSpec(
                kind=WeightKind.TABULATED, table=table, negative_region=self.negative_region
            )
        return WeightSpec(
            kind=WeightKind.POWER,
            beta=self.beta,
            dimension=self.dimension,
            negative_region=self.negative_region,
        )


class TermConfig(_Section):
    """One power term coef·h(x)·|t|^{q−2}t."""

    coef: float = Field(default=1.0)
    q: float = Field(gt=1.0)
    odd: bool = Field(default=True)
    weight: WeightConfig = Field(default_factory=WeightConfig)


class RHSConfig(_Section):
    """Power terms, optional λ-coupling weight and optional forcing."""

    terms: list[TermConfig] = Field(default_factory=list)
    coupling: bool = Field(default=False, description="Add λh(x)φ_p(t)")
    coupling_weight: WeightConfig = Field(default_factory=WeightConfig)
    forcing: list[float] | None = Field(default=None, description="Nodal forcing values")
    forcing_constant: float | None = Field(default=None, description="Constant forcing")

    @model_validator(mode="after")
    def _check_forcing(self) -> "RHSConfig":
        if self.forcing is not None and self.forcing_constant is not None:
            raise ValueError("give either forcing or forcing_constant, not both")
        return self

    def forcing_function(self, domain: Domain1D) -> GridFunction | None:
        if self.forcing is not None:
            return GridFunction(domain=domain, values=np.asarray(self.forcing, dtype=float))
        if self.forcing_constant is not None:
            return GridFunction(domain=domain, values=np.full(domain.n, self.forcing_constant))
        return None

    def build(self, domain: Domain1D, lam: float = 0.0) -> RHSSpec:
        return RHSSpec(
            terms=[
                RHSTerm(coef=term.coef, q=term.q, odd=term.odd, weight=term.weight.build(domain))
                for term in self.terms
            ],
            lambda_coupling=(
                LambdaCoupling(lam=lam, weight=self.coupling_weight.build(domain))
                if self.coupling
                else None
            ),
            forcing=self.forcing_function(domain),
        )


class SolverConfig(_Section):
    tol: float = Field(default=DEFAULT_TOL, gt=0.0)
    max_iter: int = Field(default=DEFAULT_MAX_ITER, ge=1)
    step0: float = Field(default=DEFAULT_STEP0, gt=0.0)
    seed: int = Field(default=DEFAULT_SEED)

    def options(self) -> SolverOptions:
        return SolverOptions(
            tol=self.tol, max_iter=self.max_iter, step0=self.step0, seed=self.seed
        )


class CheckWeightBlock(_Section):
    """Class and exponents for check-weight."""

    weight_class: WeightClass = Field(default=WeightClass.TILDE_WQ, alias="class")
    q: float = Field(default=2.0, ge=1.0, description="Growth exponent of the class")
    p0: float | None = Field(default=None, gt=1.0, description="Lorentz p0, default N/(sp)")
    q0: float = Field(default=2.0, gt=1.0, description="Lorentz q0")
    numeric: bool = Field(default=False, description="Force the numeric Lorentz branch")


class EigenBlock(_Section):
    path_points: int = Field(default=PATH_POINTS, ge=4, description="Points m of the odd path")
    climbing: bool = Field(default=True, description="Climb the highest path point")
    simplicity_trials: int = Field(default=0, ge=0, description="Seeded restarts, 0 skips")
    oracle: bool = Field(default=False, description="Dense p = 2 spectrum")

    @model_validator(mode="after")
    def _check_even(self) -> "EigenBlock":
        if self.path_points % 2:
            raise ValueError(f"path_points even violated: {self.path_points}")
        return self


class BoundsBlock(_Section):
    """Growth of the right-hand side that produced the solution."""

    growth: list[GrowthTerm] = Field(
        default_factory=lambda: [GrowthTerm(q=2.0, r=math.inf, a=0.0)]
    )
    n_max: int = Field(default=DEGIORGI_N_MAX, ge=1)
    q_bar: float | None = Field(default=None, description="Recursion exponent q̄")

    def spec(self) -> GrowthSpec:
        return GrowthSpec(terms=list(self.growth))


class SolveBlock(_Section):
    """Fredholm problem or small-solution search."""

    mode: Literal["fredholm", "small"] = Field(default="fredholm")
    lam: float = Field(default=0.5, alias="lambda", description="λ of the Fredholm problem")
    lambda1: float | None = Field(default=None, gt=0.0)
    lambda2: float | None = Field(default=None, gt=0.0)
    t1: float | None = Field(default=None, gt=0.0, description="Default: sampled t1")
    t2: float | None = Field(default=None, gt=0.0)
    gamma: float | None = Field(default=None, gt=0.0)
    n_levels: int = Field(default=4, ge=1, description="Subspace levels X_1..X_n")

    @model_validator(mode="after")
    def _check_lambdas(self) -> "SolveBlock":
        if self.lambda1 is not None and self.lambda2 is not None and not self.lambda1 < self.lambda2:
            raise ValueError(f"lambda1 < lambda2 violated: {self.lambda1} >= {self.lambda2}")
        return self

    def truncation(self, t1: float) -> TruncationSpec:
        return TruncationSpec(t1=t1, t2=self.t2, gamma=self.gamma)


class BifurcateBlock(_Section):
    steps: int = Field(default=200, ge=1)
    step: float = Field(default=BRANCH_STEP, gt=0.0, description="Arclength in the E-norm")
    epsilon: float = Field(default=BRANCH_EPSILON, gt=0.0, description="Start amplitude")
    both_directions: bool = Field(default=True, description="Mirror the branch to −u")
    lambda2: float | None = Field(default=None, gt=0.0, description="λ-bound reference")


class ExperimentConfig(_Section):
    """Full resolved configuration of a run."""

    domain: DomainConfig = Field(default_factory=DomainConfig)
    operator: OperatorConfig = Field(default_factory=OperatorConfig)
    weight: WeightConfig = Field(default_factory=WeightConfig)
    rhs: RHSConfig = Field(default_factory=RHSConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    check_weight: CheckWeightBlock = Field(default_factory=CheckWeightBlock)
    eigen: EigenBlock = Field(default_factory=EigenBlock)
    bounds: BoundsBlock = Field(default_factory=BoundsBlock)
    solve: SolveBlock = Field(default_factory=SolveBlock)
    bifurcate: BifurcateBlock = Field(default_factory=BifurcateBlock)

    @model_validator(mode="after")
    def _check_exponents(self) -> "ExperimentConfig":
        critical = self.operator.space().critical
        for index, term in enumerate(self.rhs.terms):
            if not term.q < critical:
                raise ValueError(f"q < p_s* violated by term {index}: q={term.q}, p_s*={critical:.6g}")
        n = self.domain.n
        tables = [("weight", self.weight.values), ("forcing", self.rhs.forcing)]
        tables += [(f"term {i} weight", t.weight.values) for i, t in enumerate(self.rhs.terms)]
        for label, values in tables:
            if values is not None and len(values) != n:
                raise ValueError(f"{label} has {len(values)} values, grid has n={n}")
        return self

    def require_solver_grid(self) -> None:
        """Solver commands run on the 1-D grid with 0 < s < 1."""
        if self.operator.N != 1:
            raise ValidationError(f"N = 1 required by the solver grid, got N={self.operator.N}")
        if not self.operator.s < 1.0:
            raise ValidationError(f"s < 1 required by the solver grid, got s={self.operator.s}")

    def lorentz(self) -> LorentzParams:
        block = self.check_weight
        if block.p0 is not None:
            return LorentzParams(p0=block.p0, q0=block.q0)
        sp = self.operator.s * self.operator.p
        if not sp < self.operator.N:
            raise ValidationError("s*p < N required for the default p0 = N/(sp)")
        return LorentzParams(p0=self.operator.N / sp, q0=block.q0)


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON dump with sorted keys."""
    canonical = json.dumps(
        config.model_dump(by_alias=True),
        sort_keys=True,
        separators=(",", ":"),
        default=str,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config(path: str | Path | None = None, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """
    Load configuration from a JSON file and apply section overrides.

    Args:
        path: Config file; falls back to FRACPLAP_CONFIG, then to defaults
        overrides: {section: {field: value}} merged over the file contents

    Returns:
        Validated ExperimentConfig

    Raises:
        ValidationError: If the file is missing or is not a JSON object
        pydantic.ValidationError: If a field or cross-field constraint fails
    """
    source = path if path is not None else os.environ.get(CONFIG_PATH_ENV)
    data: dict[str, Any] = {}
    if source:
        file_path = Path(source)
        if not file_path.is_file():
            raise ValidationError(f"Config file not found: {file_path}")
        try:
            data = json.loads(file_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as error:
            raise ValidationError(f"Config file {file_path} is not valid JSON: {error}") from error
        if not isinstance(data, dict):
            raise ValidationError(f"Config file {file_path} must hold a JSON object")
    for section, values in (overrides or {}).items():
        merged = dict(data.get(section) or {})
        merged.update(values)
        data[section] = merged
    return ExperimentConfig.model_validate(data)


def output_dir(explicit: str | Path | None = None) -> Path:
    """Explicit directory, else FRACPLAP_OUTPUT_DIR, else ./fracplap-out."""
    return Path(explicit or os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR)


def log_level(explicit: str | None = None) -> str:
    return (explicit or os.environ.get(LOG_LEVEL_ENV) or "INFO").upper()
