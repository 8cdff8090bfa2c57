"""Numerical laboratory for nonlocal Dirichlet problems in one dimension."""

__version__ = "0.1.0"
