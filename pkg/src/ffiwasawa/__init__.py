"""Class groups and Iwasawa invariants of imaginary quadratic function fields."""

__version__ = "0.1.0"
