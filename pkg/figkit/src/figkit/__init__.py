"""Figure rendering for block relay simulation result bundles.

Consumes the blocks.csv / summary.csv contract written by the simulator's
metrics layer and renders the four standard result figures as SVG. No
simulator code is imported; the CSV files and the simulator CLI are the only
coupling points.
"""

from .contract import ContractError, read_table
from .figures import FigureSpec, RenderedFigure, model_stale_rate, render

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "FigureSpec",
    "RenderedFigure",
    "model_stale_rate",
    "read_table",
    "render",
]
