"""Pseudo-triangulations of generically rigid plane graphs."""

__version__ = "0.1.0"
