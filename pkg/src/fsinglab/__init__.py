"""Exact computations with F-singularities of pairs on polynomial rings."""

__version__ = "0.1.0"
