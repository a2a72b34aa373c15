"""Batch figure renderer for zxwave CSV artifacts."""

from .render import FigureSpec, SchemaError, render

__version__ = "0.1.0"
