"""Numerical toolkit for frequency-based stratification of two-phase fields."""

__version__ = "0.1.0"
