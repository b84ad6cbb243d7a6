"""Spatial dynamics, amplitude equations and front speeds for hexagon and square patterns."""

__version__ = "0.1.0"
