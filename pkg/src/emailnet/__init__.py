"""Email co-reference networks from raw storage images."""

__version__ = "0.1.0"
