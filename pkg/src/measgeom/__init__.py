"""Monitored Clifford circuits with spacetime-modulated measurement density."""

__version__ = "0.1.0"
