"""Hyperdimensional computing primitives and their quantum-circuit counterparts."""

__version__ = "0.1.0"
