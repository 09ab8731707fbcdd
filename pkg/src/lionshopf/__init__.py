"""Coupled Hopf algebra of Lions forests and probabilistic rough path lifts."""

__version__ = "0.1.0"
