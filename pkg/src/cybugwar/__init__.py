"""Cybug war: a scripted-agent battle simulator."""

__version__ = "0.1.0"
