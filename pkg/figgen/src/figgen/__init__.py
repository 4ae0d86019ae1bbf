"""Figure rendering for overlap-spread result files."""

from .render import RenderResult, render
from .spec import KINDS, FigureSpec, SchemaError

__version__ = "0.1.0"

__all__ = ["FigureSpec", "KINDS", "RenderResult", "SchemaError", "render"]
