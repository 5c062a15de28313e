"""A priori L^∞ bounds by De Giorgi iteration."""

from fracplap.regularity.apriori import (
    DeGiorgiTrace,
    FitVerdict,
    GrowthSpec,
    GrowthTerm,
    RecursionExponents,
    ScalingFit,
    TraceChecks,
    check_trace_inequalities,
    compute_qtilde,
    degiorgi_trace,
    find_kstar,
    lq_norm,
    recursion_exponents,
    scaling_fit,
)

__all__ = [
    "DeGiorgiTrace",
    "FitVerdict",
    "GrowthSpec",
    "GrowthTerm",
    "RecursionExponents",
    "ScalingFit",
    "TraceChecks",
    "check_trace_inequalities",
    "compute_qtilde",
    "degiorgi_trace",
    "find_kstar",
    "lq_norm",
    "recursion_exponents",
    "scaling_fit",
]
