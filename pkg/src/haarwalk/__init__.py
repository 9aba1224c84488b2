"""Stochastic quantum walks on waveguide lattices and their convergence to Haar randomness."""

__version__ = "0.1.0"
