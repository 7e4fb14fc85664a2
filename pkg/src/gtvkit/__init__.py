"""Generalized tangent vectors for one-dimensional conservation laws with shocks."""

__version__ = "0.1.0"
