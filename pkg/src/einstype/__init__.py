"""Curvature engine and identity checker for gradient Einstein-type structures."""

__version__ = "0.1.0"
