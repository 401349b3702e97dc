"""Workbench for recognizable languages over monads given by equational presentations."""

__version__ = "0.1.0"
