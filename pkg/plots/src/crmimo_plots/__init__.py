from .render import FigureSpec, RenderError, RenderInfo, read_summary, render

__version__ = "0.1.0"
