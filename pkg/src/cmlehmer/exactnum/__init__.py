"""Exact number structures: rationals, quadratic and cyclotomic integers,
algebraic numbers, places, and certified interval scalars."""

from .._rat import BigRational, rational, rational_str
from .quadint import (
    CLASS_NUMBER_ONE_DISCS,
    QuadElt,
    QuadField,
    QuadInt,
    canonical_associate,
    cornacchia,
    ideal_generator,
    norm_p_candidates,
    pi_adic_valuation,
    quad_gcd,
    units,
)
from .cyclo import (
    CycloElt,
    CycloField,
    cyclo_field,
    cyclotomic_poly,
    euler_phi,
    frobenius_congruence_check,
    frobenius_substitution,
    ideal_power_membership,
    inertia_congruence_check,
    inertia_group,
    min_valuation_over_p,
    ramification_data,
)
from .algnum import AlgebraicNumber, minimal_polynomial
from .places import Place, archimedean_places, places_over

__all__ = [
    "BigRational", "rational", "rational_str",
    "CLASS_NUMBER_ONE_DISCS", "QuadElt", "QuadField", "QuadInt",
    "canonical_associate", "cornacchia", "ideal_generator",
    "norm_p_candidates", "pi_adic_valuation", "quad_gcd", "units",
    "CycloElt", "CycloField", "cyclo_field", "cyclotomic_poly", "euler_phi",
    "frobenius_congruence_check", "frobenius_substitution",
    "ideal_power_membership", "inertia_congruence_check", "inertia_group",
    "min_valuation_over_p", "ramification_data",
    "AlgebraicNumber", "minimal_polynomial",
    "Place", "archimedean_places", "places_over",
]
