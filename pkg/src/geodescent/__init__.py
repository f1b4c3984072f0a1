"""Certified descent and accelerated first-order methods on Riemannian manifolds."""

from geodescent import acceleration, descent, geometry, harness, objectives

__version__ = "0.1.0"

__all__ = ["geometry", "objectives", "descent", "acceleration", "harness", "__version__"]
