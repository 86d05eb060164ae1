"""Indefinite binary quadratic form census and congruence-subgroup statistics."""

from fractions import Fraction

from ._geodesic import (
    GeodesicError,
    alpha,
    census,
    class_number,
    companion,
    h1,
    l1_crosscheck,
    li,
    m_value,
    mu_estimate,
    pell_fundamental,
    sarnak_ratio,
    siegel_ratio,
    verify_m,
)
from ._geodesic import _mu_theoretical


def mu_theoretical(condition: str) -> Fraction:
    """Limiting density of a condition such as "3|d and (d/5)=-1"."""
    return Fraction(_mu_theoretical(condition))


__all__ = [
    "GeodesicError",
    "alpha",
    "census",
    "class_number",
    "companion",
    "h1",
    "l1_crosscheck",
    "li",
    "m_value",
    "mu_estimate",
    "mu_theoretical",
    "pell_fundamental",
    "sarnak_ratio",
    "siegel_ratio",
    "verify_m",
]
