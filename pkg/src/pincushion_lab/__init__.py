"""Pincushion Lab - pincushion graphs, graph-product words, and a selective Lin laboratory."""

__version__ = "0.1.1"
