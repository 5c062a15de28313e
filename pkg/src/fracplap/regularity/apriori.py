"""
De Giorgi level-set iteration on discrete solutions.

The levels k_n = k*(2 − 2^{−n}) increase to 2k*; the truncation masses
Z_n = ∫_{u > k_n} (u − k_n)^q̃ decay to zero exactly when the bound
sup u ≤ 2k* is effective. k* is certified by bisection on that decay.
"""

import math
from enum import Enum

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, Field

from fracplap.core.constants import (
    DEGIORGI_N_MAX,
    DEGIORGI_THRESHOLD,
    KSTAR_BISECTION_STEPS,
    KSTAR_SAFETY,
    SCALING_MIN_DECADES,
    SCALING_MIN_SOLUTIONS,
)
from fracplap.core.errors import InconclusiveError, ValidationError
from fracplap.core.logging_config import get_logger
from fracplap.discretization.grid import GridFunction
from fracplap.weights.models import SpaceParams

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]


class GrowthTerm(BaseModel):
    """|f| ≤ h|t|^{q−1} with hρ^{sa} ∈ L^r."""

    q: float = Field(ge=1.0, description="Growth exponent")
    r: float = Field(gt=1.0, description="Integrability of hρ^{sa}; may be inf")
    a: float = Field(ge=0.0, le=1.0, description="Boundary-distance power")


class GrowthSpec(BaseModel):
    """Growth terms of the right-hand side."""

    terms: list[GrowthTerm] = Field(min_length=1)


class DeGiorgiTrace(BaseModel):
    """Levels, truncation masses and the convergence flag for one k*."""

    k_star: float = Field(gt=0.0)
    q_tilde: float
    levels: list[float]
    masses: list[float]
    converged: bool

    @property
    def bound(self) -> float:
        return 2.0 * self.k_star


class TraceChecks(BaseModel):
    """Exact pointwise checks of one trace."""

    monotone_levels: bool = Field(description="k_n < k_{n+1} < 2k*")
    monotone_masses: bool = Field(description="Z_{n+1} ≤ Z_n")
    mass_comparison: bool = Field(description="|A_{k_{n+1}}| ≤ 2^{(n+1)q̃} k*^{−q̃} Z_n")
    truncation_chain: bool = Field(
        description="w_{n+1} ≤ w_n and u < (2^{n+2} − 1)w_n on A_{k_{n+1}}"
    )

    @property
    def all_hold(self) -> bool:
        return (
            self.monotone_levels
            and self.monotone_masses
            and self.mass_comparison
            and self.truncation_chain
        )


class RecursionExponents(BaseModel):
    """Exponents of the superlinear recursion Z_{n+1} ≤ C bⁿ max(Z_n^{1+δ₁}, Z_n^{1+δ₂})."""

    q_tilde: float
    q_bar: float
    sigma1: float
    sigma2: float
    delta1: float
    delta2: float
    b: float


class FitVerdict(str, Enum):
    """Outcome of the two-regime scaling fit."""

    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    INCONCLUSIVE = "inconclusive"  # too few solutions or too little spread


class ScalingFit(BaseModel):
    """log|u|_∞ against log|u|_q̃ fitted by two lines."""

    gamma_low: float
    gamma_high: float
    constant: float
    fit_residual: float
    breakpoint: float = Field(description="|u|_q̃ separating the two regimes")
    verdict: FitVerdict


def _term_qtilde(term: GrowthTerm, params: SpaceParams) -> float:
    top = max(params.p, term.q)
    inv_r = 0.0 if math.isinf(term.r) else 1.0 / term.r
    lhs = inv_r + term.a / params.p + (top - term.a) * params.inverse_critical()
    if lhs >= 1.0:
        raise ValidationError(
            f"Growth term violates 1/r + a/p + (max(p,q) − a)/p_s* < 1: "
            f"value {lhs:.6g} for q={term.q}, r={term.r}, a={term.a}"
        )
    return (top - term.a) / (1.0 - inv_r - term.a / params.p)


def compute_qtilde(spec: GrowthSpec, params: SpaceParams) -> float:
    """
    q̃ = max_i (max{p, q_i} − a_i)/(1 − 1/r_i − a_i/p).

    Raises:
        ValidationError: If a term violates the growth-class inequality
    """
    values = [_term_qtilde(term, params) for term in spec.terms]
    q_tilde = max(values)
    if not 1.0 < q_tilde < params.critical:
        raise ValidationError(
            f"q̃ = {q_tilde:.6g} must lie in (1, p_s*) with p_s* = {params.critical:.6g}"
        )
    return q_tilde


def recursion_exponents(
    spec: GrowthSpec, params: SpaceParams, q_bar: float | None = None
) -> RecursionExponents:
    """
    σ₁, σ₂, δ₁, δ₂ and b of the level recursion for an auxiliary q̄ ∈ (q̃, p_s*).

    q̄ defaults to the midpoint of (q̃, p_s*), or 2q̃ when p_s* is infinite.
    """
    q_tilde = compute_qtilde(spec, params)
    critical = params.critical
    if q_bar is None:
        q_bar = 2.0 * q_tilde if math.isinf(critical) else 0.5 * (q_tilde + critical)
    if not q_tilde < q_bar < critical:
        raise ValidationError(f"q̄ must satisfy q̃ < q̄ < p_s*, got q̄={q_bar}")
    p = params.p
    shift = q_tilde * (q_bar - q_tilde) / q_bar
    sigmas = [(p - min(p, t.q)) * q_tilde / (p - t.a) + shift for t in spec.terms]
    powers = [(max(p, t.q) - 1.0) * q_tilde / (p - t.a) + shift for t in spec.terms]
    deltas = [(max(p, t.q) - t.a) / (p - t.a) - q_tilde / q_bar for t in spec.terms]
    return RecursionExponents(
        q_tilde=q_tilde,
        q_bar=q_bar,
        sigma1=min(sigmas),
        sigma2=max(sigmas),
        delta1=min(deltas),
        delta2=max(deltas),
        b=max(2.0**power for power in powers),
    )


def _levels(k_star: float, n_max: int) -> FloatArray:
    return k_star * (2.0 - 2.0 ** -np.arange(n_max + 1, dtype=float))


def _masses(values: FloatArray, levels: FloatArray, q_tilde: float, w: float) -> FloatArray:
    excess = np.maximum(values[None, :] - levels[:, None], 0.0)
    return w * np.sum(excess**q_tilde, axis=1)


def degiorgi_trace(
    u: GridFunction,
    k_star: float,
    q_tilde: float,
    n_max: int = DEGIORGI_N_MAX,
) -> DeGiorgiTrace:
    """
    Levels k_n and masses Z_n for n = 0..n_max.

    Converged means Z_{n_max} < 10⁻¹⁴·Z_0 or Z_0 = 0.
    """
    if k_star <= 0.0:
        raise ValidationError(f"degiorgi_trace needs k* > 0, got {k_star}")
    if n_max < 1:
        raise ValidationError(f"degiorgi_trace needs n_max >= 1, got {n_max}")
    values = np.asarray(u.values, dtype=float)
    levels = _levels(k_star, n_max)
    masses = _masses(values, levels, q_tilde, u.domain.cell_weight)
    converged = bool(masses[0] == 0.0 or masses[-1] < DEGIORGI_THRESHOLD * masses[0])
    return DeGiorgiTrace(
        k_star=k_star,
        q_tilde=q_tilde,
        levels=levels.tolist(),
        masses=masses.tolist(),
        converged=converged,
    )


def _certifies(u: GridFunction, k_star: float, q_tilde: float, n_max: int) -> bool:
    trace = degiorgi_trace(u, k_star, q_tilde, n_max)
    masses = np.asarray(trace.masses)
    return trace.converged and bool(np.all(np.diff(masses) <= 0.0))


def _kstar_one_sided(u: GridFunction, q_tilde: float, n_max: int) -> float:
    peak = float(np.max(u.values))
    if peak <= 0.0:
        return 0.0
    hi = 0.5 * peak * (1.0 + KSTAR_SAFETY)
    lo = 0.0
    for _ in range(KSTAR_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if _certifies(u, mid, q_tilde, n_max):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break
    if 2.0 * hi < peak:
        hi = 0.5 * peak * (1.0 + KSTAR_SAFETY)
    return hi


def find_kstar(
    u: GridFunction, q_tilde: float, n_max: int = DEGIORGI_N_MAX
) -> float:
    """
    Smallest certified k* with max|u| ≤ 2k*, for u and −u alike.

    Raises:
        ValidationError: For u = 0
        InconclusiveError: If no k* certifies within n_max levels
    """
    if not np.any(u.values):
        raise ValidationError("find_kstar is undefined for u = 0")
    k_star = max(_kstar_one_sided(u, q_tilde, n_max), _kstar_one_sided(-u, q_tilde, n_max))
    for signed in (u, -u):
        if not _certifies(signed, k_star, q_tilde, n_max):
            raise InconclusiveError(
                f"No certified k* within n_max={n_max} levels: the trace at k*={k_star:.6g} "
                f"does not reach {DEGIORGI_THRESHOLD:g}·Z_0 with nonincreasing masses"
            )
    logger.debug(f"Certified k* = {k_star:.12g} (sup|u| = {u.sup_norm:.12g})")
    return k_star


def check_trace_inequalities(u: GridFunction, trace: DeGiorgiTrace) -> TraceChecks:
    """Evaluate the level, mass and truncation inequalities of a trace exactly."""
    values = np.asarray(u.values, dtype=float)
    w = u.domain.cell_weight
    levels = np.asarray(trace.levels)
    masses = np.asarray(trace.masses)
    q_tilde = trace.q_tilde
    k_star = trace.k_star

    monotone_levels = bool(np.all(np.diff(levels) > 0.0) and levels[-1] < 2.0 * k_star)
    monotone_masses = bool(np.all(np.diff(masses) <= 0.0))

    comparison = True
    chain = True
    for n in range(len(levels) - 1):
        above = values > levels[n + 1]
        measure = w * np.count_nonzero(above)
        bound = 2.0 ** ((n + 1) * q_tilde) / k_star**q_tilde * masses[n]
        comparison &= measure <= bound * (1.0 + 1e-12)
        w_n = np.maximum(values - levels[n], 0.0)
        w_next = np.maximum(values - levels[n + 1], 0.0)
        chain &= bool(np.all(w_next <= w_n))
        chain &= bool(np.all(values[above] < (2.0 ** (n + 2) - 1.0) * w_n[above]))
    return TraceChecks(
        monotone_levels=monotone_levels,
        monotone_masses=monotone_masses,
        mass_comparison=bool(comparison),
        truncation_chain=bool(chain),
    )


def lq_norm(u: GridFunction, q: float) -> float:
    return float((u.domain.cell_weight * np.sum(np.abs(u.values) ** q)) ** (1.0 / q))


def scaling_fit(
    solutions: list[GridFunction], q_tilde: float, log_slack: float = 0.1
) -> ScalingFit:
    """
    Fit log|u|_∞ against log|u|_q̃ with one line per regime.

    The breakpoint minimizing the total squared residual is chosen; the fit
    is consistent when every point satisfies |u|_∞ ≤ C max(|u|_q̃^γ₁, |u|_q̃^γ₂)
    with C from the larger fitted intercept, up to log_slack, and both
    slopes are positive.
    """
    nan = float("nan")
    inconclusive = ScalingFit(
        gamma_low=nan,
        gamma_high=nan,
        constant=nan,
        fit_residual=nan,
        breakpoint=nan,
        verdict=FitVerdict.INCONCLUSIVE,
    )
    if len(solutions) < SCALING_MIN_SOLUTIONS:
        logger.warning(f"scaling_fit needs {SCALING_MIN_SOLUTIONS} solutions, got {len(solutions)}")
        return inconclusive
    x = np.log(np.array([lq_norm(u, q_tilde) for u in solutions]))
    y = np.log(np.array([u.sup_norm for u in solutions]))
    if (x.max() - x.min()) / math.log(10.0) < SCALING_MIN_DECADES:
        logger.warning("scaling_fit: |u|_q̃ spans fewer than two decades")
        return inconclusive
    order = np.argsort(x)
    x, y = x[order], y[order]
    best: tuple[float, int, FloatArray, FloatArray] | None = None
    for split in range(2, x.size - 1):
        low = np.polyfit(x[:split], y[:split], 1)
        high = np.polyfit(x[split:], y[split:], 1)
        ssr = float(
            np.sum((np.polyval(low, x[:split]) - y[:split]) ** 2)
            + np.sum((np.polyval(high, x[split:]) - y[split:]) ** 2)
        )
        if best is None or ssr < best[0]:
            best = (ssr, split, low, high)
    assert best is not None
    ssr, split, low, high = best
    gamma_low, gamma_high = float(low[0]), float(high[0])
    log_constant = float(max(low[1], high[1]))
    envelope = log_constant + np.maximum(gamma_low * x, gamma_high * x)
    excess = float(np.max(y - envelope))
    consistent = gamma_low > 0.0 and gamma_high > 0.0 and excess <= log_slack
    return ScalingFit(
        gamma_low=gamma_low,
        gamma_high=gamma_high,
        constant=math.exp(log_constant + max(excess, 0.0)),
        fit_residual=math.sqrt(ssr / x.size),
        breakpoint=float(math.exp(0.5 * (x[split - 1] + x[split]))),
        verdict=FitVerdict.CONSISTENT if consistent else FitVerdict.INCONSISTENT,
    )


