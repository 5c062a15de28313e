"""
Membership tests for the weight classes A_q, W_q, W̃_q, L^r and the
continuity class.

Power weights are decided in closed form: hρ^{sa} ∈ L^r exactly when
r(β − sa) < 1, so for each a the admissible 1/r form an open interval whose
lower end comes from integrability and whose upper end comes from the class
inequality. Tabulated weights replace the closed form by a refinement
estimate of the boundary singularity of |hρ^{sa}|^r.
"""

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from fracplap.core.constants import (
    TABULATED_MIN_MARGIN,
    TABULATED_R_CANDIDATES,
    WITNESS_RELATIVE_SLACK,
    WITNESS_SCAN_POINTS,
)
from fracplap.core.errors import ValidationError
from fracplap.core.logging_config import get_logger
from fracplap.discretization.grid import Domain1D, distance_to_boundary
from fracplap.weights.models import (
    ClassReport,
    SpaceParams,
    WeightClass,
    WeightKind,
    WeightSpec,
    Witness,
)

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]


def critical_exponent(params: SpaceParams) -> float:
    """p_s* = Np/(N − sp) when sp < N, +∞ otherwise."""
    return params.critical


@dataclass(frozen=True)
class _ClassShape:
    """Exponent data of one class inequality 1/r + a/p + (Q − a)/p_s* < 1."""

    weight_class: WeightClass
    growth: float  # Q: q for W_q, max{p, q} for W̃_q and continuity
    a_low: float
    a_high: float
    a_closed: bool  # whether a_high itself is admissible
    uses_rho: bool  # False for the L^r-type classes (a fixed at 0)

    def a_grid(self) -> FloatArray:
        if not self.uses_rho or self.a_high <= self.a_low:
            return np.array([self.a_low])
        return np.linspace(
            self.a_low, self.a_high, WITNESS_SCAN_POINTS, endpoint=self.a_closed
        )


def _require_subcritical(params: SpaceParams) -> None:
    if params.q >= params.critical:
        raise ValidationError(
            f"Weight classes require q < p_s*, got q={params.q} >= p_s*={params.critical}"
        )


def _shape(weight_class: WeightClass, params: SpaceParams) -> _ClassShape:
    top = max(params.p, params.q)
    match weight_class:
        case WeightClass.WQ:
            return _ClassShape(weight_class, params.q, 0.0, params.q, False, True)
        case WeightClass.TILDE_WQ:
            return _ClassShape(weight_class, top, 0.0, 1.0, True, True)
        case WeightClass.AQ:
            return _ClassShape(weight_class, params.q, 0.0, 0.0, True, False)
        case WeightClass.CONTINUITY:
            return _ClassShape(weight_class, top, 0.0, 0.0, True, False)
        case WeightClass.AR:
            # only r > 1 is required; the class inequality degenerates to 1/r < 1
            return _ClassShape(weight_class, 0.0, 0.0, 0.0, True, False)
    raise ValidationError(f"No exponent inequality for class {weight_class.value}")


def class_slack(shape: _ClassShape, params: SpaceParams, a: float, r: float) -> float:
    """1 − (1/r + a/p + (Q − a)/p_s*); positive iff the class inequality holds."""
    if shape.weight_class == WeightClass.AR:
        return 1.0 - 1.0 / r
    return 1.0 - (
        1.0 / r + a / params.p + (shape.growth - a) * params.inverse_critical()
    )


def _power_integrability_slack(beta: float, s_a: float, r: float) -> float:
    """1 − r(β − sa), capped at 1 when the product is bounded."""
    return 1.0 - r * max(beta - s_a, 0.0)


def _singularity_exponent(
    values: FloatArray, domain: Domain1D
) -> float:
    """
    Estimate γ such that the nonnegative nodal function behaves like ρ^{−γ}.

    Compares midpoint sums on the grid and on its 2h and 4h subgrids: the
    successive differences scale like h^{1−γ}, so γ = 1 + log₂(d₁/d₂).
    """
    w = domain.cell_weight
    fine = w * float(np.sum(values))
    half = 2.0 * w * float(np.sum(values[1::2]))
    quarter = 4.0 * w * float(np.sum(values[3::4]))
    d1, d2 = fine - half, half - quarter
    scale = max(abs(fine), 1e-300)
    if abs(d1) <= 1e-14 * scale and abs(d2) <= 1e-14 * scale:
        return 0.0
    if d2 == 0.0 or d1 / d2 <= 0.0:
        return 0.0
    return max(0.0, 1.0 + math.log2(d1 / d2))


def _require_nested_grid(domain: Domain1D) -> None:
    if (domain.n + 1) % 4 != 0:
        raise ValidationError(
            f"Tabulated weights need n + 1 divisible by 4 for nested refinement, got n={domain.n}"
        )


def tabulated_integrability_slack(
    weight: WeightSpec, params: SpaceParams, a: float, r: float
) -> float:
    """1 − γ̂ for |hρ^{sa}|^r, γ̂ the estimated boundary singularity exponent."""
    assert weight.table is not None
    domain = weight.table.domain
    _require_nested_grid(domain)
    rho = distance_to_boundary(domain)
    integrand = (np.abs(weight.table.values) * rho ** (params.s * a)) ** r
    return 1.0 - _singularity_exponent(integrand, domain)


def verify_witness(
    weight: WeightSpec,
    params: SpaceParams,
    weight_class: WeightClass,
    a: float,
    r: float,
) -> float:
    """
    Re-check a witness (a, r) against its defining inequalities.

    Returns:
        The smallest slack; the witness is valid iff the value is positive
        (and, for tabulated weights, exceeds the configured margin)
    """
    shape = _shape(weight_class, params)
    if r <= 1.0 or not shape.a_low <= a <= shape.a_high:
        return -math.inf
    if shape.uses_rho and not shape.a_closed and a >= shape.a_high:
        return -math.inf
    slack = class_slack(shape, params, a, r)
    if weight.kind == WeightKind.POWER:
        integrability = _power_integrability_slack(weight.beta, params.s * a, r)
    else:
        integrability = tabulated_integrability_slack(weight, params, a, r)
        integrability -= TABULATED_MIN_MARGIN
    return min(slack, integrability)


def _power_scan(
    weight: WeightSpec, params: SpaceParams, shape: _ClassShape
) -> tuple[Witness | None, float]:
    """Best (a, r) over the a-grid, r taken from the middle of the feasible band."""
    a = shape.a_grid()
    lower = np.maximum(weight.beta - params.s * a, 0.0)
    if shape.weight_class == WeightClass.AR:
        upper = np.ones_like(a)
    else:
        upper = np.minimum(
            1.0,
            1.0 - a / params.p - (shape.growth - a) * params.inverse_critical(),
        )
    width = upper - lower
    feasible = width > WITNESS_RELATIVE_SLACK * np.maximum(1.0, np.abs(upper))
    if not np.any(feasible):
        return None, float(np.max(width))
    best = int(np.argmax(np.where(feasible, width, -np.inf)))
    inv_r = 0.5 * (lower[best] + upper[best])
    witness = Witness(a=float(a[best]), r=float(1.0 / inv_r))
    margin = verify_witness(weight, params, shape.weight_class, witness.a, witness.r)
    return witness, margin


def _tabulated_scan(
    weight: WeightSpec, params: SpaceParams, shape: _ClassShape
) -> tuple[Witness | None, float]:
    """Numeric search over (a, 1/r) candidates; keeps the largest margin."""
    a_grid = shape.a_grid()
    if a_grid.size > 100:
        a_grid = a_grid[:: a_grid.size // 100]
    inv_r = np.linspace(0.0, 1.0, TABULATED_R_CANDIDATES + 2)[1:-1]
    best: tuple[Witness | None, float] = (None, -math.inf)
    for a in a_grid:
        for value in inv_r:
            r = float(1.0 / value)
            if class_slack(shape, params, float(a), r) <= 0.0:
                continue
            margin = verify_witness(weight, params, shape.weight_class, float(a), r)
            if margin > best[1]:
                best = (Witness(a=float(a), r=r), margin)
    return best


def _check(
    weight: WeightSpec, params: SpaceParams, weight_class: WeightClass
) -> ClassReport:
    _require_subcritical(params)
    shape = _shape(weight_class, params)
    if weight.kind == WeightKind.POWER:
        witness, margin = _power_scan(weight, params, shape)
    else:
        witness, margin = _tabulated_scan(weight, params, shape)
    member = witness is not None and margin > 0.0
    if not member:
        witness = None
    diagnostic = (
        f"{weight_class.value}: witness a={witness.a:.6g}, r={witness.r:.6g}, margin={margin:.3g}"
        if witness is not None
        else f"{weight_class.value}: no feasible (a, r); best slack {margin:.3g}"
    )
    logger.debug(diagnostic)
    report = ClassReport(
        weight_class=weight_class,
        member=member,
        witness=witness,
        margin=margin if member else min(margin, 0.0),
        diagnostic=diagnostic,
    )
    flag = {
        WeightClass.AQ: "in_Aq",
        WeightClass.WQ: "in_Wq",
        WeightClass.TILDE_WQ: "in_tildeWq",
        WeightClass.CONTINUITY: "in_continuity",
        WeightClass.AR: "in_Ar",
    }[weight_class]
    return report.model_copy(update={flag: member})


def check_Wq(weight: WeightSpec, params: SpaceParams) -> ClassReport:
    """
    Decide h ∈ W_q: hρ^{sa} ∈ L^r with 1/r + a/p + (q − a)/p_s* < 1, a ∈ [0, q).

    Raises:
        ValidationError: If q >= p_s*
    """
    return _check(weight, params, WeightClass.WQ)


def check_tildeWq(weight: WeightSpec, params: SpaceParams) -> ClassReport:
    """Decide h ∈ W̃_q: as W_q with max{p, q} and a in the closed interval [0, 1]."""
    return _check(weight, params, WeightClass.TILDE_WQ)


def check_Aq(weight: WeightSpec, params: SpaceParams) -> ClassReport:
    """Decide h ∈ A_q: h ∈ L^r with 1/r + q/p_s* < 1."""
    return _check(weight, params, WeightClass.AQ)


def check_continuity_class(weight: WeightSpec, params: SpaceParams) -> ClassReport:
    """Decide h ∈ L^r with 1/r + max{p, q}/p_s* < 1."""
    return _check(weight, params, WeightClass.CONTINUITY)


def check_Ar(weight: WeightSpec, params: SpaceParams) -> ClassReport:
    """
    Decide h ∈ L^r for some r > 1 and report the largest verified r.

    For power weights the supremum 1/β is reported (∞ for bounded weights);
    tabulated weights report the largest candidate r with positive margin.
    """
    report = _check(weight, params, WeightClass.AR)
    if weight.kind == WeightKind.POWER:
        r_max = math.inf if weight.beta == 0.0 else 1.0 / weight.beta
    else:
        candidates = [
            1.0 / v
            for v in np.linspace(0.0, 1.0, TABULATED_R_CANDIDATES + 2)[1:-1]
            if verify_witness(weight, params, WeightClass.AR, 0.0, 1.0 / v) > 0.0
        ]
        r_max = max(candidates) if candidates else None
    return report.model_copy(update={"r_max": r_max if report.member else None})


def in_lebesgue(weight: WeightSpec, r: float) -> bool:
    """h ∈ L^r for a power weight: rβ < 1."""
    if weight.kind != WeightKind.POWER:
        raise ValidationError("in_lebesgue is closed-form and needs a power weight")
    return r * weight.beta < 1.0


def classify(weight: WeightSpec, params: SpaceParams) -> ClassReport:
    """Run every class test and merge the flags into one W̃_q-headed report."""
    reports = {
        WeightClass.AR: check_Ar(weight, params),
        WeightClass.AQ: check_Aq(weight, params),
        WeightClass.WQ: check_Wq(weight, params),
        WeightClass.TILDE_WQ: check_tildeWq(weight, params),
        WeightClass.CONTINUITY: check_continuity_class(weight, params),
    }
    head = reports[WeightClass.TILDE_WQ]
    return head.model_copy(
        update={
            "in_Ar": reports[WeightClass.AR].member,
            "r_max": reports[WeightClass.AR].r_max,
            "in_Aq": reports[WeightClass.AQ].member,
            "in_Wq": reports[WeightClass.WQ].member,
            "in_tildeWq": head.member,
            "in_continuity": reports[WeightClass.CONTINUITY].member,
        }
    )
