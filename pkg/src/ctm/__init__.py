"""Categorical reference-dependent choice models, axiom checks and identification."""

__version__ = "0.1.0"
