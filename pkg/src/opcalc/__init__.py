"""Exact calculus for reduced operads and their decorated tree resolutions."""

__version__ = "0.1.0"
