"""Unified detection-rule generation and pairwise-preference evaluation."""

__version__ = "0.1.0"
