"""Toolkit for Moments of Change in user post timelines."""

__version__ = "0.1.0"
