"""Exact computations for conics on the Fermat quintic threefold."""

__version__ = "0.1.0"
