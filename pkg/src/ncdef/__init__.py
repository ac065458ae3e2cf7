"""Noncommutative deformation hulls via matric Massey products."""

__version__ = "0.1.0"
