"""Constructive maps between polynomial and plane-cubic moduli, with numerical certificates."""

__version__ = "0.1.0"
