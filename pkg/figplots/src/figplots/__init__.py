"""Render floqff experiment CSVs into publication-style figures."""

__version__ = "0.1.0"

from .recipes import FIGURE_IDS, RECIPES, Panel, PlotRecipe, Series
from .render import RenderReport, SchemaError, read_csv, render

__all__ = ["FIGURE_IDS", "RECIPES", "Panel", "PlotRecipe", "Series",
           "RenderReport", "SchemaError", "read_csv", "render"]
