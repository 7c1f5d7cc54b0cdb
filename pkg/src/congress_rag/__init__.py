"""Agentic retrieval toolkit for congressional research workflows."""

__version__ = "0.1.0"
