"""Uncertain knowledge graph embedding with soft-logic reasoning."""

__version__ = "1.0.0"
