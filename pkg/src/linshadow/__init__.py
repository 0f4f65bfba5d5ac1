"""Numerical toolkit for shadowing, chain recurrence and distributional chaos of linear operators."""

__version__ = "0.1.0"
