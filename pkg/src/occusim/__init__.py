"""Occupant behaviour / zone CO2 co-simulation."""

__version__ = "0.1.0"
