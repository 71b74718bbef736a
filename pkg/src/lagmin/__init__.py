"""Cohomogeneity-one minimal Lagrangian submanifolds of CH^n, CP^n and C^n:
construction of the families and numerical verification of their geometry."""

__version__ = "0.1.0"

from . import geomcheck, immersions, model_spaces, profiles  # noqa: F401
