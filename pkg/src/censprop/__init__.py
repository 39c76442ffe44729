"""Exact checks of censoring assumptions for competing-risks data."""

__version__ = "0.1.0"
