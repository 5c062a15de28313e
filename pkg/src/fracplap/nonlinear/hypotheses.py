"""
Checks of the structural conditions (F1)–(F6) on a right-hand side.

Growth and parity conditions of power terms are decided by exponent
comparison; limits at t → 0 and the sign condition are sampled on a
log-spaced t-grid at every node, so they only certify the sampled range.
"""

import numpy as np
import numpy.typing as npt

from fracplap.core.constants import (
    HYPOTHESIS_T_MAX,
    HYPOTHESIS_T_MIN,
    HYPOTHESIS_T_POINTS,
    T1_SAFETY,
)
from fracplap.core.errors import ValidationError
from fracplap.core.logging_config import get_logger
from fracplap.discretization.grid import Domain1D, GridFunction
from fracplap.nonlinear.models import Hypothesis, HypothesisReport, RHSSpec
from fracplap.nonlinear.rhs import NodalRHS, evaluate_rhs
from fracplap.weights.classes import check_tildeWq, check_Wq
from fracplap.weights.models import SpaceParams, WeightSpec

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]


def _levels() -> FloatArray:
    return np.geomspace(HYPOTHESIS_T_MIN, HYPOTHESIS_T_MAX, HYPOTHESIS_T_POINTS)


def _largest_prefix(levels: FloatArray, ok: FloatArray) -> float | None:
    """Largest level up to which ok holds at every smaller level."""
    if not ok[0]:
        return None
    failing = np.flatnonzero(~ok)
    return float(levels[-1] if failing.size == 0 else levels[failing[0] - 1])


def _sampling(n: int) -> tuple[FloatArray, FloatArray]:
    levels = _levels()
    grid = levels[:, None] * np.ones(n)
    return levels, grid


def estimate_t0(nodal: NodalRHS, n: int) -> float | None:
    """Largest sampled t with pF − ft > 0 for all 0 < |t'| ≤ t at every node."""
    levels, grid = _sampling(n)
    positive = nodal.p * nodal.F(grid) - nodal.f(grid) * grid > 0.0
    negative = nodal.p * nodal.F(-grid) + nodal.f(-grid) * grid > 0.0
    return _largest_prefix(levels, np.all(positive & negative, axis=1))


def estimate_t1(nodal: NodalRHS, n: int, t0: float | None) -> float | None:
    """T1_SAFETY times the largest sampled t with F ≥ |t|^p below it, capped by t0."""
    levels, grid = _sampling(n)
    power = (levels**nodal.p)[:, None]
    ok = np.all((nodal.F(grid) >= power) & (nodal.F(-grid) >= power), axis=1)
    scan = _largest_prefix(levels, ok)
    if scan is None or t0 is None:
        return None
    return T1_SAFETY * min(scan, t0)


def _ratio_slope(nodal: NodalRHS, n: int) -> float:
    """Slope of log min_x |f(x,t)|/t^{p−1} over the two smallest sampled decades."""
    levels = _levels()
    window = levels <= 100.0 * HYPOTHESIS_T_MIN
    grid = levels[window][:, None] * np.ones(n)
    ratio = np.min(np.abs(nodal.f(grid)), axis=1) / levels[window] ** (nodal.p - 1.0)
    with np.errstate(divide="ignore"):
        logs = np.log(ratio)
    if not np.all(np.isfinite(logs)):
        return float("nan")
    return float(np.polyfit(np.log(levels[window]), logs, 1)[0])


def _growth_terms(rhs: RHSSpec) -> list[tuple[WeightSpec, float, str]]:
    """(weight, exponent, label) for every term including a forcing (q = 1)."""
    items = [(term.weight, term.q, f"term {index}") for index, term in enumerate(rhs.terms)]
    if rhs.forcing is not None:
        table = GridFunction(domain=rhs.forcing.domain, values=np.abs(rhs.forcing.values))
        items.append((WeightSpec.tabulated(table), 1.0, "forcing"))
    return items


def _class_violation(
    weight: WeightSpec, q: float, label: str, params: SpaceParams, tilde: bool
) -> str | None:
    name = "W̃" if tilde else "W"
    try:
        scoped = params.model_copy(update={"q": q})
        report = check_tildeWq(weight, scoped) if tilde else check_Wq(weight, scoped)
    except ValidationError as error:
        return f"{label}: class {name}_{q:g} check rejected the weight ({error})"
    if not report.member:
        return f"{label}: weight is not in {name}_{q:g} ({report.diagnostic})"
    return None


def _check_f1(rhs: RHSSpec, params: SpaceParams) -> list[str]:
    violations = []
    for weight, q, label in _growth_terms(rhs):
        if not 1.0 <= q < params.critical:
            violations.append(f"{label}: q={q:g} outside [1, p_s*={params.critical:.6g})")
            continue
        problem = _class_violation(weight, q, label, params, tilde=True)
        if problem:
            violations.append(problem)
    return violations


def _check_f2(rhs: RHSSpec, params: SpaceParams) -> list[str]:
    violations = []
    sublinear = 0
    for weight, q, label in _growth_terms(rhs):
        if q == params.p or q >= params.critical:
            violations.append(f"{label}: q={q:g} must lie in [1, p) or (p, p_s*)")
            continue
        if q < params.p:
            sublinear += 1
        problem = _class_violation(weight, q, label, params, tilde=False)
        if problem:
            violations.append(problem)
    if sublinear > 1:
        violations.append(f"{sublinear} terms with q < p; at most one h_0 term is allowed")
    return violations


def _check_f3(rhs: RHSSpec, params: SpaceParams) -> list[str]:
    violations = [
        f"term {index}: q={term.q:g} <= p={params.p:g}, so f/φ_p does not vanish at 0"
        for index, term in enumerate(rhs.terms)
        if term.q <= params.p
    ]
    if rhs.forcing is not None and np.any(rhs.forcing.values):
        violations.append("forcing: f(x, 0) ≠ 0")
    return violations


def _check_f5(rhs: RHSSpec, nodal: NodalRHS, params: SpaceParams) -> list[str]:
    if rhs.forcing is not None:
        return ["forcing: f(x, t)/φ_p(t) changes sign with t near 0"]
    if not rhs.terms:
        return ["no power term"]
    q_min = min(term.q for term in rhs.terms)
    if q_min >= params.p:
        return [f"smallest exponent q={q_min:g} is not below p={params.p:g}"]
    leading = sum(
        (nodal_term.scale for nodal_term in nodal.terms if nodal_term.q == q_min),
        np.zeros(nodal.terms[0].scale.size),
    )
    if not np.all(leading > 0.0):
        return [f"coefficient of the |t|^{q_min:g} terms is not positive at every node"]
    if not all(term.odd for term in rhs.terms if term.q == q_min):
        return [f"the |t|^{q_min:g} term is not odd, so the limit differs for t < 0"]
    return []


def _check_f6(rhs: RHSSpec) -> list[str]:
    violations = [
        f"term {index}: |t|^{term.q - 1:g} without sign is even in t"
        for index, term in enumerate(rhs.terms)
        if not term.odd
    ]
    if rhs.forcing is not None and np.any(rhs.forcing.values):
        violations.append("forcing: constant in t, not odd")
    return violations


def check_hypotheses(
    rhs: RHSSpec,
    which: Hypothesis | str,
    domain: Domain1D,
    params: SpaceParams,
) -> HypothesisReport:
    """
    Check one of (F1)–(F6) and report the violations.

    The sampled levels t0 (sign condition) and t1 (F ≥ |t|^p below t1,
    capped by t0) are attached to every report.
    """
    which = Hypothesis(which)
    nodal = evaluate_rhs(rhs, domain, params.p)
    n = domain.n
    t0 = estimate_t0(nodal, n)
    t1 = estimate_t1(nodal, n, t0) if not _check_f6(rhs) else None
    if which == Hypothesis.F1:
        violations = _check_f1(rhs, params)
    elif which == Hypothesis.F2:
        violations = _check_f2(rhs, params)
    elif which == Hypothesis.F3:
        violations = _check_f3(rhs, params)
    elif which == Hypothesis.F4:
        violations = [] if t0 is not None else ["pF − ft <= 0 at the smallest sampled |t|"]
    elif which == Hypothesis.F5:
        violations = _check_f5(rhs, nodal, params)
    else:
        violations = _check_f6(rhs)
    report = HypothesisReport(
        which=which,
        holds=not violations,
        violations=violations,
        t0=t0,
        t1=t1,
        ratio_slope=_ratio_slope(nodal, n) if rhs.terms else None,
    )
    if violations:
        logger.info(f"({which.value}) fails: {'; '.join(violations)}")
    return report
