"""Rank-zero congruent curves with 2-primary Sha of type (Z/2)^2k."""

__version__ = "0.1.0"
