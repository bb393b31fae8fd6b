"""Symmetry, Noether and conservation-law verification for 1D cylindrical MHD
in mass Lagrangian coordinates, with a conservative Lagrangian solver."""

__version__ = "0.1.0"
