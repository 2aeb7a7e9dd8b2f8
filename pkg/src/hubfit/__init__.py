"""Bose-Hubbard parameters for two bosons in a triple-well optical lattice."""

__version__ = "0.1.0"
