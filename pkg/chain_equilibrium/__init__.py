"""Equilibration of squeezed harmonic chains at covariance level."""

__version__ = "0.1.0"
