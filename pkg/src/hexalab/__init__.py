"""Exact verification of nonconstant hexagon relations on the 5-simplex."""

__version__ = "0.1.0"
