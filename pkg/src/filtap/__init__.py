"""Exact filtered power-series approximation with certificates."""
__version__ = "0.1.0"
