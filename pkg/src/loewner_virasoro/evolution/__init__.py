"""Löwner-Kufarev evolution of coefficients and momenta."""

from .driving import (
    CaratheodoryReport,
    DrivingError,
    DrivingFunction,
    caratheodory_check,
    kernel_series,
    parse_complex,
)
from .flow import (
    BlowUpError,
    DegenerateNormalizationError,
    EvolutionState,
    Trajectory,
    alternate_evolve,
    closed_form_linear,
    coefficient_velocity,
    integrate,
    loewner_limit,
    momentum_velocity,
    normalized_coefficients,
    q_series,
    richardson_error,
    rk4,
)
from .virasoro import (
    ConservedReport,
    ConservedSeries,
    VerificationRecord,
    bracket_cross_check,
    build_L_nonpositive,
    conserved_virasoro,
    function_level_action,
    kirillov_action_check,
    lcal_negative,
    pairing_window,
    psibar_star,
)

__all__ = [
    "CaratheodoryReport",
    "DrivingError",
    "DrivingFunction",
    "caratheodory_check",
    "kernel_series",
    "parse_complex",
    "BlowUpError",
    "DegenerateNormalizationError",
    "EvolutionState",
    "Trajectory",
    "alternate_evolve",
    "closed_form_linear",
    "coefficient_velocity",
    "integrate",
    "loewner_limit",
    "momentum_velocity",
    "normalized_coefficients",
    "q_series",
    "richardson_error",
    "rk4",
    "ConservedReport",
    "ConservedSeries",
    "VerificationRecord",
    "bracket_cross_check",
    "build_L_nonpositive",
    "conserved_virasoro",
    "function_level_action",
    "kirillov_action_check",
    "lcal_negative",
    "pairing_window",
    "psibar_star",
]
