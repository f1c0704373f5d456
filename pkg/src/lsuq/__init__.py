"""2D acoustic scattering on random star-shaped domains: Lippmann-Schwinger
volume-integral solver, QMC forward UQ, and Bayesian shape inversion."""

__version__ = "0.1.0"
