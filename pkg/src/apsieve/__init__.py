"""Elimination pipeline for n(n+d)...(n+(k-1)d) = b*y^2 with gcd(n, d) = 1."""

__version__ = "0.1.0"
