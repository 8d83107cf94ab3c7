"""Subgraph count estimation from egocentric network samples."""

__version__ = "0.1.0"
