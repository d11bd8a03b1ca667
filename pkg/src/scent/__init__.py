"""Numerical toolkit for Schmidt correlated bipartite states."""
__version__ = "0.1.0"
