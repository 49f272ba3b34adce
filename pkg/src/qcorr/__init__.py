"""Quantum correlation measures, hardness reductions and verification suites."""

__version__ = "0.1.0"
