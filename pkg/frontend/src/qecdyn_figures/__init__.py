"""Figure rendering for qecdyn CSV outputs; no recomputation, files in, image out."""

from .render import FigureSpec, render

__all__ = ["FigureSpec", "render"]
