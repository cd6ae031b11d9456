"""Toolkit for the Euclid-Mullin graph and its loop structure."""

__version__ = "0.1.0"
