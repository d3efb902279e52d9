"""Curvature integrals on singular projective hypersurfaces, checked against exact invariants."""

__version__ = "0.1.0"
