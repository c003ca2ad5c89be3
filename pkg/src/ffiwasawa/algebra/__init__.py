from .field import FieldElement, FieldError, FiniteField, field_make, quadratic_character
from .intpoly import int_resultant, int_resultant_modular, p_valuation
from .poly import Poly, poly_squarefree

__all__ = [
    "FieldElement",
    "FieldError",
    "FiniteField",
    "Poly",
    "field_make",
    "int_resultant",
    "int_resultant_modular",
    "p_valuation",
    "poly_squarefree",
    "quadratic_character",
]
