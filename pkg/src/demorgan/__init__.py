"""Finite-matrix workbench for logics of upsets of De Morgan lattices."""

__version__ = "0.1.0"
