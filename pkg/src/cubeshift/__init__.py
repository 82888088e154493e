"""Shifted-cube Diophantine inequalities |F(x) - tau| < eta, computed at desk scale."""

__version__ = "0.1.0"
