"""Graphs on surfaces: embeddings, genus search, cycle surgery, excluded minors and bounds."""

__version__ = "0.1.0"
