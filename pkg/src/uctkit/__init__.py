"""uctkit: exact computations with small Z-linear categories and their modules."""

__version__ = "0.1.0"
