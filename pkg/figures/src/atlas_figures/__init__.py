"""Figure rendering for atlas-sensing CSV outputs.

Consumes the harness CSV schema (trials.csv / summary.csv) and renders
deterministic PNG figures: curves with overlay columns, and probability
heatmaps with a color scale pinned to [0, 1]. No statistic is ever
recomputed here; only columns present in the CSVs are plotted.
"""

from .spec import FigureSpec, SpecError, load_spec
from .render import render, read_csv

__all__ = ["FigureSpec", "SpecError", "load_spec", "render", "read_csv"]
__version__ = "0.1.0"
