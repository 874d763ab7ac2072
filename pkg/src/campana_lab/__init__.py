"""Counting, orbit combinatorics and local series for norm-form orbifolds."""

__version__ = "0.1.0"
