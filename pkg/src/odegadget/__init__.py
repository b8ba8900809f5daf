"""Smooth ODE gadgets that decide counting-quantified Boolean formulas."""

__version__ = "0.1.0"
