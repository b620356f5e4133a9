"""Figure rendering for aoi-relay sweep CSVs."""

from .render import FIGURE_IDS, FigureJob, SchemaError, render

__all__ = ["FIGURE_IDS", "FigureJob", "SchemaError", "render"]
