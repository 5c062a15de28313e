"""
Distribution functions, decreasing rearrangements and Lorentz membership.

Power weights h(x) = (1 − |x|)^{−β} on the unit ball of R^N have closed
forms; tabulated weights use cell counting on their grid.
"""

import math

import numpy as np
import numpy.typing as npt
from scipy.integrate import trapezoid
from scipy.special import gamma

from fracplap.core.constants import (
    LORENTZ_CONVERGENCE_TOL,
    LORENTZ_DECADES_PER_REFINEMENT,
    LORENTZ_GROWTH_FACTOR,
    LORENTZ_POINTS_PER_DECADE,
    MONTE_CARLO_SAMPLES,
)
from fracplap.core.errors import ValidationError
from fracplap.core.logging_config import get_logger
from fracplap.weights.models import (
    LorentzParams,
    LorentzReport,
    Verdict,
    WeightKind,
    WeightSpec,
)

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]

# log of the largest finite double, with headroom
_LOG_OVERFLOW = 700.0


def ball_volume(N: int) -> float:
    """|B(0,1)| in R^N."""
    return float(math.pi ** (N / 2) / gamma(N / 2 + 1))


def _sorted_table(weight: WeightSpec) -> tuple[FloatArray, float]:
    assert weight.table is not None
    magnitudes = np.sort(np.abs(np.asarray(weight.table.values, dtype=float)))[::-1]
    return magnitudes, weight.table.domain.cell_weight


def distribution_function(weight: WeightSpec, level: float) -> float:
    """
    α_h(s) = |{x : |h(x)| > s}|.

    Args:
        weight: Power weight on the unit ball of R^weight.dimension, or tabulated
        level: Level s ≥ 0

    Returns:
        Measure of the superlevel set
    """
    if level < 0:
        raise ValidationError(f"distribution_function needs level >= 0, got {level}")
    if weight.kind == WeightKind.TABULATED:
        magnitudes, cell = _sorted_table(weight)
        return float(cell * np.count_nonzero(magnitudes > level))
    volume = ball_volume(weight.dimension)
    if weight.beta == 0.0:
        return volume if level < 1.0 else 0.0
    if level <= 1.0:
        return volume
    radius = 1.0 - level ** (-1.0 / weight.beta)
    return volume - volume * radius**weight.dimension


def decreasing_rearrangement(weight: WeightSpec, t: float) -> float:
    """
    h*(t) = inf{s > 0 : α_h(s) ≤ t}.

    Power weights: [1 − (1 − t/|B|)^{1/N}]^{−β} for t < |B|, 0 beyond.
    Tabulated weights: the (⌊t/cell⌋ + 1)-th largest |h_i|.
    """
    if t <= 0:
        raise ValidationError(f"decreasing_rearrangement needs t > 0, got {t}")
    if weight.kind == WeightKind.TABULATED:
        magnitudes, cell = _sorted_table(weight)
        k = int(math.floor(t / cell))
        return float(max(magnitudes[k], 0.0)) if k < magnitudes.size else 0.0
    volume = ball_volume(weight.dimension)
    if t >= volume:
        return 0.0
    return float(math.exp(weight.beta * -_log_gap(t / volume, weight.dimension)))


def _log_gap(fraction: float | FloatArray, N: int) -> FloatArray:
    """log(1 − (1 − fraction)^{1/N}), accurate for tiny fractions."""
    return np.log(-np.expm1(np.log1p(-np.asarray(fraction, dtype=float)) / N))


def monte_carlo_superlevel_volume(
    weight: WeightSpec, level: float, samples: int = MONTE_CARLO_SAMPLES, seed: int = 0
) -> float:
    """Monte-Carlo estimate of α_h(s) for a power weight on the unit ball."""
    if weight.kind != WeightKind.POWER:
        raise ValidationError("Monte-Carlo volume is implemented for power weights")
    rng = np.random.default_rng(seed)
    N = weight.dimension
    points = rng.uniform(-1.0, 1.0, size=(samples, N))
    radius = np.linalg.norm(points, axis=1)
    inside = radius < 1.0
    values = (1.0 - radius[inside]) ** (-weight.beta)
    cube = 2.0**N
    return float(cube * np.count_nonzero(values > level) / samples)


def _log_integrand(weight: WeightSpec, lorentz: LorentzParams, log_t: FloatArray) -> FloatArray:
    """log of [t^{1/p0} h*(t)]^{q0} as a function of log t (measure dt/t = d log t)."""
    volume = ball_volume(weight.dimension)
    fraction = np.exp(log_t) / volume
    log_h_star = -weight.beta * _log_gap(fraction, weight.dimension)
    return lorentz.q0 * (log_t / lorentz.p0 + log_h_star)


def _power_segment(
    weight: WeightSpec, lorentz: LorentzParams, log_lo: float, log_hi: float
) -> float:
    decades = (log_hi - log_lo) / math.log(10.0)
    points = max(int(decades * LORENTZ_POINTS_PER_DECADE), 16) + 1
    log_t = np.linspace(log_lo, log_hi, points)
    exponent = _log_integrand(weight, lorentz, log_t)
    if np.max(exponent) > _LOG_OVERFLOW:
        return math.inf
    return float(trapezoid(np.exp(exponent), log_t))


def _numeric_power(weight: WeightSpec, lorentz: LorentzParams) -> LorentzReport:
    volume = ball_volume(weight.dimension)
    # stop just short of |B| where h* jumps to 0
    log_top = math.log(volume) + math.log1p(-1e-12)
    step = LORENTZ_DECADES_PER_REFINEMENT * math.log(10.0)
    cutoffs = [math.log(volume) - step * j for j in (1, 2, 3)]
    segments = [
        _power_segment(weight, lorentz, cutoffs[0], log_top),
        _power_segment(weight, lorentz, cutoffs[1], cutoffs[0]),
        _power_segment(weight, lorentz, cutoffs[2], cutoffs[1]),
    ]
    integrals = list(np.cumsum(segments))
    return _refinement_verdict(integrals, method="numeric")


def _refinement_verdict(integrals: list[float], method: str) -> LorentzReport:
    first, second, third = integrals
    if math.isinf(third):
        return LorentzReport(
            verdict=Verdict.NOT_MEMBER,
            member=False,
            method=method,
            integrals=integrals,
            diagnostic="integrand overflows at the finest cutoff",
        )
    growth = (second / first, third / second)
    # the t → 0 end of a power-weight integrand is geometric in the cutoff,
    # so the part beyond the last cutoff is seg3·r/(1 − r) with r = seg3/seg2
    seg2, seg3 = second - first, third - second
    ratio = seg3 / seg2 if seg2 > 0.0 else 0.0
    tail = seg3 * ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
    if min(growth) > LORENTZ_GROWTH_FACTOR:
        verdict = Verdict.NOT_MEMBER
    elif tail <= LORENTZ_CONVERGENCE_TOL * third:
        verdict = Verdict.MEMBER
    else:
        verdict = Verdict.INCONCLUSIVE
    member = None if verdict == Verdict.INCONCLUSIVE else verdict == Verdict.MEMBER
    diagnostic = (
        f"refinement growth {growth[0]:.4g}, {growth[1]:.4g}; "
        f"segment ratio {ratio:.4g}, extrapolated tail {tail / third:.3g} of the integral"
    )
    if verdict == Verdict.INCONCLUSIVE:
        logger.warning(f"Lorentz refinement inconclusive: {diagnostic}")
    return LorentzReport(
        verdict=verdict,
        member=member,
        method=method,
        integrals=integrals,
        diagnostic=diagnostic,
    )


def _table_integral(magnitudes: FloatArray, cell: float, lorentz: LorentzParams) -> float:
    """Exact ∫ t^{q0/p0} h*(t)^{q0} dt/t for a piecewise-constant rearrangement."""
    exponent = lorentz.q0 / lorentz.p0
    edges = cell * np.arange(magnitudes.size + 1, dtype=float)
    pieces = np.diff(edges**exponent) / exponent
    return float(np.sum(magnitudes**lorentz.q0 * pieces))


def _numeric_tabulated(weight: WeightSpec, lorentz: LorentzParams) -> LorentzReport:
    assert weight.table is not None
    domain = weight.table.domain
    if (domain.n + 1) % 4 != 0:
        raise ValidationError(
            f"Tabulated weights need n + 1 divisible by 4 for nested refinement, got n={domain.n}"
        )
    values = np.abs(np.asarray(weight.table.values, dtype=float))
    levels = [(values[3::4], 4.0), (values[1::2], 2.0), (values, 1.0)]
    integrals = [
        _table_integral(np.sort(v)[::-1], factor * domain.cell_weight, lorentz)
        for v, factor in levels
    ]
    d1, d2 = integrals[2] - integrals[1], integrals[1] - integrals[0]
    ratio = d1 / d2 if d2 != 0.0 else 0.0
    if d1 > 0.0 and d2 > 0.0 and ratio > 1.05:
        verdict = Verdict.NOT_MEMBER
    elif abs(ratio) < 0.95:
        verdict = Verdict.MEMBER
    else:
        verdict = Verdict.INCONCLUSIVE
    member = None if verdict == Verdict.INCONCLUSIVE else verdict == Verdict.MEMBER
    return LorentzReport(
        verdict=verdict,
        member=member,
        method="numeric",
        integrals=integrals,
        diagnostic=f"successive difference ratio {ratio:.4g}",
    )


def lorentz_membership(
    weight: WeightSpec, lorentz: LorentzParams, numeric: bool = False
) -> LorentzReport:
    """
    Decide h ∈ L^{p0, q0}(Ω).

    Power weights: the analytic branch gives membership iff (1/p0 − β)q0 > 0,
    i.e. β < 1/p0 in every dimension. With numeric=True, or for tabulated
    weights, ∫ [t^{1/p0} h*(t)]^{q0} dt/t is evaluated on refining cutoffs and
    the verdict may be inconclusive.
    """
    if weight.kind == WeightKind.TABULATED:
        return _numeric_tabulated(weight, lorentz)
    if numeric:
        return _numeric_power(weight, lorentz)
    member = (1.0 / lorentz.p0 - weight.beta) * lorentz.q0 > 0.0
    return LorentzReport(
        verdict=Verdict.MEMBER if member else Verdict.NOT_MEMBER,
        member=member,
        method="analytic",
        diagnostic=f"threshold β < 1/p0 = {1.0 / lorentz.p0:.6g}",
    )
