"""Pseudospectral simulation of a degenerate Cahn-Hilliard model with a
stabilizing function, its regularizations, and a nonlocal climb extension."""

__version__ = "0.1.0"
