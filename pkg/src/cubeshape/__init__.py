"""Shapes of complex cubic fields and the closed geodesics they lie on."""

__version__ = "0.1.0"
