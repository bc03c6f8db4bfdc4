"""Spectral community detection and bibliometric network statistics."""

__version__ = "0.1.0"
