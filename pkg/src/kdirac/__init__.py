"""Exact verification of k-Dirac operator sequences on the flat model."""

__version__ = "0.1.0"
