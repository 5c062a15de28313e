"""Weight functions and their integrability classes."""

from fracplap.weights.classes import (
    check_Aq,
    check_Ar,
    check_continuity_class,
    check_tildeWq,
    check_Wq,
    classify,
    critical_exponent,
    in_lebesgue,
    verify_witness,
)
from fracplap.weights.models import (
    ClassReport,
    LorentzParams,
    LorentzReport,
    SpaceParams,
    Verdict,
    WeightClass,
    WeightKind,
    WeightSpec,
    Witness,
    weight_values,
)
from fracplap.weights.rearrangement import (
    ball_volume,
    decreasing_rearrangement,
    distribution_function,
    lorentz_membership,
)

__all__ = [
    "ClassReport",
    "LorentzParams",
    "LorentzReport",
    "SpaceParams",
    "Verdict",
    "WeightClass",
    "WeightKind",
    "WeightSpec",
    "Witness",
    "ball_volume",
    "check_Aq",
    "check_Ar",
    "check_Wq",
    "check_continuity_class",
    "check_tildeWq",
    "classify",
    "critical_exponent",
    "decreasing_rearrangement",
    "distribution_function",
    "in_lebesgue",
    "lorentz_membership",
    "verify_witness",
    "weight_values",
]
