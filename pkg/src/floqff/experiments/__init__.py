"""Experiment configuration, CSV output, figure recipes, and the CLI."""

from .config import ExperimentConfig, load_config, parse_config_text
from .csvio import read_csv, write_csv
from .figures import FIGURE_RECIPES, FigureRecipe, run_figure, run_scan

__all__ = [
    "ExperimentConfig", "load_config", "parse_config_text",
    "read_csv", "write_csv",
    "FIGURE_RECIPES", "FigureRecipe", "run_figure", "run_scan",
]
