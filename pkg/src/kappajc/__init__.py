"""Kappa-deformed Jaynes-Cummings and anti-Jaynes-Cummings models."""

from .params import ModelParams

__version__ = "0.1.0"

__all__ = ["ModelParams", "__version__"]
