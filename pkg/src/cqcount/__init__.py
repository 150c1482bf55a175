"""Exact answer counting for conjunctive queries and their extensions."""

__version__ = "0.1.0"
