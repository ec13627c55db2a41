"""CSV reading and figure rendering.

Reads the simulation tool's CSV contract ('#' comment block, header row,
empty cells = NaN) without importing it, and renders each recipe to SVG
and PNG.  SVG output is byte-stable for fixed tool versions: the Date
metadata is stripped and the hash salt pinned to the figure id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .recipes import RECIPES, PlotRecipe  # noqa: E402


class SchemaError(Exception):
    """Input CSV missing, empty, or lacking a required column."""


def read_csv(path) -> dict:
    comments, header, rows = [], None, []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                comments.append(line[1:].strip())
            elif header is None:
                header = line.split(",")
            elif line:
                rows.append([float(c) if c else math.nan for c in line.split(",")])
    if header is None or not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    columns = {name: data[:, i] for i, name in enumerate(header)}
    columns["__comments__"] = comments
    return columns


def _column(table: dict, name: str, path) -> np.ndarray:
    if name not in table:
        raise SchemaError(f"{path}: missing column {name!r}")
    return table[name]


@dataclass(frozen=True)
class RenderReport:
    """Structural summary of one rendered figure, for golden checks."""

    figure_id: str
    svg_path: Path
    png_path: Path
    n_series: int
    n_bands: int
    panel_xscales: tuple
    panel_yscales: tuple
    panel_xlims: tuple
    panel_ylims: tuple


def _plot_series(ax, series, csv_dir: Path):
    files = sorted(csv_dir.glob(series.pattern))
    if not files:
        raise SchemaError(f"no csv matches {series.pattern!r} in {csv_dir}")
    n_lines = n_bands = 0
    for idx, path in enumerate(files):
        table = read_csv(path)
        x = _column(table, series.x, path)
        y = _column(table, series.y, path)
        label = series.label if series.label and len(files) == 1 else path.stem
        if series.hline:
            # one horizontal guide per row (e.g. per-bandwidth baselines)
            for level in y:
                ax.axhline(level, color=series.color, linestyle="--", linewidth=1.0)
                n_lines += 1
            continue
        kwargs = {"label": label}
        if series.color:
            kwargs["color"] = series.color
        if series.style == "points":
            ax.plot(x, y, "o", markersize=4, **kwargs)
        elif series.style == "dashed":
            ax.plot(x, y, "--", linewidth=1.2, **kwargs)
        else:
            ax.plot(x, y, "-", linewidth=1.6, **kwargs)
        n_lines += 1
        if series.band is not None:
            spread = _column(table, series.band, path)
            ax.fill_between(x, y - spread, y + spread, alpha=0.25,
                            color=series.color, linewidth=0)
            n_bands += 1
    return n_lines, n_bands


def render(recipe: "PlotRecipe | str", csv_dir, out_dir) -> RenderReport:
    """Render one recipe from csv_dir; writes <id>.svg and <id>.png."""
    if isinstance(recipe, str):
        if recipe not in RECIPES:
            raise KeyError(f"unknown figure id {recipe!r}; known: {', '.join(sorted(RECIPES))}")
        recipe = RECIPES[recipe]
    csv_dir = Path(csv_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    with plt.rc_context({"svg.hashsalt": recipe.figure_id}):
        fig, axes = plt.subplots(1, len(recipe.panels),
                                 figsize=(5.2 * len(recipe.panels), 3.9))
        if len(recipe.panels) == 1:
            axes = [axes]
        totals = [0, 0]
        for ax, panel in zip(axes, recipe.panels):
            for series in panel.series:
                n_lines, n_bands = _plot_series(ax, series, csv_dir)
                totals[0] += n_lines
                totals[1] += n_bands
            ax.set_xscale(panel.xscale)
            ax.set_yscale(panel.yscale)
            ax.set_xlabel(panel.xlabel)
            ax.set_ylabel(panel.ylabel)
            if panel.title:
                ax.set_title(panel.title)
            ax.legend(fontsize=7, frameon=False)
        fig.tight_layout()
        tag = recipe.figure_id.replace("-", "_")
        svg_path = out_dir / f"{tag}.svg"
        png_path = out_dir / f"{tag}.png"
        fig.savefig(svg_path, metadata={"Date": None})
        fig.savefig(png_path, dpi=150)
        report = RenderReport(
            figure_id=recipe.figure_id,
            svg_path=svg_path,
            png_path=png_path,
            n_series=totals[0],
            n_bands=totals[1],
            panel_xscales=tuple(ax.get_xscale() for ax in axes),
            panel_yscales=tuple(ax.get_yscale() for ax in axes),
            panel_xlims=tuple(ax.get_xlim() for ax in axes),
            panel_ylims=tuple(ax.get_ylim() for ax in axes),
        )
        plt.close(fig)
    return report
