"""Desk-scale convex-integration lab for the 3D quasi-geostrophic system and its 2D Euler mode."""

__version__ = "1.0.0"
