"""Numerical laboratory for metastable single-interface dynamics."""

__version__ = "0.1.0"
