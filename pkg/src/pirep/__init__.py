"""Codimensions, cocharacters and the PI-exponent of Lie algebra representations."""

__version__ = "0.1.0"
