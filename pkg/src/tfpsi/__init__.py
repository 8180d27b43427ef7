"""Finite time-frequency laboratory for Weyl operators with symbols in Sjostrand-type classes."""

__version__ = "0.1.0"
