"""Utility functions."""

from .fitting import geometric_ratio, loglog_slope

__all__ = ['geometric_ratio', 'loglog_slope']
