"""Diffuse interface indicator and property interpolation."""

from .indicator import (
    IndicatorField,
    PropertyFields,
    build_property_fields,
    interpolate_property,
    solve_indicator,
)

__all__ = [
    "IndicatorField",
    "PropertyFields",
    "build_property_fields",
    "interpolate_property",
    "solve_indicator",
]
