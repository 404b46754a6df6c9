"""Shifted convolution sums of divisor functions: exact identities and numerical checks."""

__version__ = "0.1.0"
