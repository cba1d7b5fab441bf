"""Capacity analysis toolkit for the interference relay channel under strong interference."""

__version__ = "0.1.0"
