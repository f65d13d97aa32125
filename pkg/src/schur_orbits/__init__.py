"""Mapping class group orbits of branched G-covers and reduced Schur multipliers."""

__version__ = "0.1.0"
