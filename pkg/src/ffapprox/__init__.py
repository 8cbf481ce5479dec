"""Diophantine approximation in F_p((1/T)) with exact arithmetic."""
__version__ = "0.1.0"
