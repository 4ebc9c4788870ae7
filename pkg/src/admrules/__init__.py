"""Finite-algebra tools for multiple-conclusion rules of intuitionistic logic."""

__version__ = "0.1.0"
