"""Renormalization-group laboratory for the interacting Bose gas."""

__version__ = "0.2.0"
