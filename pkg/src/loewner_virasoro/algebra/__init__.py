"""Exact symbolic algebra over the coefficients ``c_1..c_n``."""

from .exact import QI, exact
from .fields import (
    CovariantFunctional,
    OneForm,
    VectorFieldOnM,
    commutator,
    kirillov_field,
    lie_bracket,
    poisson_bracket,
)
from .polynomial import CoeffPolynomial, poly_ring
from .recurrences import (
    cdot_from_u,
    duality_matrix,
    kirillov_action_on_P,
    l0_field,
    l0_from_pi,
    omega_forms,
    omega_forms_closed,
    p_polynomials,
    p_values,
    pi_expansion,
    u_from_cdot,
    u_from_cdot_recursive,
)

__all__ = [
    "QI",
    "exact",
    "CoeffPolynomial",
    "poly_ring",
    "VectorFieldOnM",
    "CovariantFunctional",
    "OneForm",
    "kirillov_field",
    "lie_bracket",
    "commutator",
    "poisson_bracket",
    "p_polynomials",
    "p_values",
    "kirillov_action_on_P",
    "pi_expansion",
    "omega_forms",
    "omega_forms_closed",
    "duality_matrix",
    "l0_field",
    "l0_from_pi",
    "u_from_cdot",
    "u_from_cdot_recursive",
    "cdot_from_u",
]
