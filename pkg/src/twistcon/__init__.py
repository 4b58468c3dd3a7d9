"""Twisted conjugacy, twisted commutativity and growth experiments."""

__version__ = "0.1.0"
