"""Primitivity and strong primitivity of nonnegative tensors from zero patterns."""

__version__ = "0.1.0"
