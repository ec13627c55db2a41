"""Plot recipes: which CSVs feed each figure panel and how to style them.

Recipes are data.  Each figure id maps to exactly one recipe, and the id
set mirrors the simulation CLI's `figure` subcommand (the CSV contract:
'#'-prefixed comment header, then a header row of column names).
"""

from __future__ import annotations

from dataclasses import dataclass, field

# ids accepted by the simulation tool's `figure` subcommand; render keeps
# a closed 1:1 mapping onto this list
FIGURE_IDS = (
    "fig1b", "fig2", "fig3b", "fig4a", "fig4b", "fig4c",
    "supp-omega", "supp-detuning", "supp-ramsey", "supp-dd-a", "supp-dd-b",
)

PROTOCOL_COLORS = {"lz": "#7e57c2", "ff": "#f2a33c", "fe": "#3b7dd8"}


@dataclass(frozen=True)
class Series:
    """One plotted curve: a CSV file pattern plus column/style choices."""

    pattern: str
    x: str
    y: str
    label: str | None = None
    color: str | None = None
    style: str = "line"          # line | points | dashed
    band: str | None = None      # column plotted as y +- band shading
    hline: bool = False          # one horizontal line per CSV row


@dataclass(frozen=True)
class Panel:
    series: tuple
    xlabel: str
    ylabel: str
    xscale: str = "linear"
    yscale: str = "linear"
    title: str = ""


@dataclass(frozen=True)
class PlotRecipe:
    figure_id: str
    panels: tuple
    description: str = ""


def _protocol_series(stem: str, x: str, y: str, band: str | None = None,
                     protocols=("lz", "ff", "fe"), style: str = "line"):
    return tuple(
        Series(pattern=f"{stem}_{p}.csv", x=x, y=y, label=p, band=band,
               color=PROTOCOL_COLORS[p], style=style)
        for p in protocols
    )


RECIPES = {
    "fig1b": PlotRecipe("fig1b", (Panel(
        _protocol_series("fig1b", "tau_us", "fidelity_mean", band="fidelity_std"),
        xlabel="protocol duration (us)", ylabel="final fidelity",
        xscale="log", title="fidelity vs duration under dephasing"),),
        "three protocols under calibrated dephasing"),
    "fig2": PlotRecipe("fig2", (Panel(
        (Series("fig2_fe.csv", "omega_over_2pi_mhz", "infidelity",
                label="fe", color=PROTOCOL_COLORS["fe"], style="points"),),
        xlabel="drive frequency (MHz)", ylabel="1 - F",
        xscale="log", yscale="log", title="drive-frequency scaling"),),
        "stroboscopic infidelity scaling"),
    "fig3b": PlotRecipe("fig3b", (Panel(
        _protocol_series("fig3b", "t_us", "fidelity"),
        xlabel="t (us)", ylabel="fidelity", title="benchmark fidelity curves"),),
        "noiseless protocol comparison"),
    "fig4a": PlotRecipe("fig4a", (Panel(
        _protocol_series("fig4a", "gamma_rms_mhz", "fidelity_mean",
                         band="fidelity_std", protocols=("ff", "fe")),
        xlabel="noise rms (MHz)", ylabel="final fidelity",
        xscale="log", title="robustness vs noise amplitude"),),
        "final fidelity vs noise rms"),
    "fig4b": PlotRecipe("fig4b", (Panel(
        _protocol_series("fig4b", "bandwidth_mhz", "fidelity_mean",
                         band="fidelity_std", protocols=("ff", "fe")),
        xlabel="noise bandwidth (MHz)", ylabel="final fidelity",
        xscale="log", title="robustness vs noise bandwidth"),),
        "final fidelity vs noise bandwidth"),
    "fig4c": PlotRecipe("fig4c", (Panel(
        _protocol_series("fig4c", "tau_us", "fidelity_mean",
                         band="fidelity_std", protocols=("ff", "fe")),
        xlabel="protocol duration (us)", ylabel="final fidelity",
        title="robustness vs duration"),),
        "final fidelity vs duration under noise"),
    "supp-omega": PlotRecipe("supp-omega", (Panel(
        (Series("supp_omega_fe.csv", "capital_omega", "infidelity",
                label="initial-state infidelity", color=PROTOCOL_COLORS["fe"]),),
        xlabel="Omega", ylabel="1 - F", yscale="log",
        title="initial-state infidelity vs drive strength"),),
        "guard-band gaps appear as breaks in the curve"),
    "supp-detuning": PlotRecipe("supp-detuning", (Panel(
        _protocol_series("supp_detuning", "t_us", "fidelity_mean", band="fidelity_std")
        + tuple(Series(f"supp_detuning_{p}.csv", "t_us", "fidelity_nodetuning",
                       label=f"{p} (no detuning)", color="#222222", style="dashed")
                for p in ("lz", "ff", "fe")),
        xlabel="t (us)", ylabel="fidelity", title="detuning bands"),),
        "mean +- std bands under Gaussian detuning"),
    "supp-ramsey": PlotRecipe("supp-ramsey", (
        Panel((Series("supp_ramsey_rms.csv", "gamma_rms_mhz", "gamma_d_mhz",
                      label="fit", color="#3b7dd8", style="points"),),
              xlabel="noise rms (MHz)", ylabel="Gamma_d (1/us)",
              xscale="log", title="decay rate vs rms"),
        Panel((Series("supp_ramsey_bandwidth.csv", "bandwidth_mhz", "gamma_d_mhz",
                      label="fit", color="#3b7dd8", style="points"),),
              xlabel="noise bandwidth (MHz)", ylabel="Gamma_d (1/us)",
              xscale="log", title="decay rate vs bandwidth"),),
        "Ramsey dephasing-rate scans"),
    "supp-dd-a": PlotRecipe("supp-dd-a", (Panel(
        (Series("supp_dd_a_fe_bw*.csv", "omega_over_2pi_mhz", "infidelity_mean",
                style="points"),
         Series("supp_dd_a_fe_noiseless.csv", "omega_over_2pi_mhz", "infidelity",
                label="no noise", color="#c62828"),
         Series("supp_dd_a_ff_baseline.csv", "bandwidth_mhz", "infidelity_mean",
                label="ff baseline", color="#555555", style="dashed", hline=True)),
        xlabel="Floquet frequency (MHz)", ylabel="1 - F",
        xscale="log", yscale="log", title="decoupling, fixed spectral density"),),
        "fe infidelity vs drive frequency per bandwidth"),
    "supp-dd-b": PlotRecipe("supp-dd-b", (Panel(
        (Series("supp_dd_b_fe_bw*.csv", "omega_over_2pi_mhz", "infidelity_mean",
                style="points"),
         Series("supp_dd_b_fe_noiseless.csv", "omega_over_2pi_mhz", "infidelity",
                label="no noise", color="#c62828"),
         Series("supp_dd_b_ff_baseline.csv", "bandwidth_mhz", "infidelity_mean",
                label="ff baseline", color="#555555", style="dashed", hline=True)),
        xlabel="Floquet frequency (MHz)", ylabel="1 - F",
        xscale="log", yscale="log", title="decoupling, fixed rms"),),
        "same scan at constant noise rms"),
}

assert tuple(sorted(RECIPES)) == tuple(sorted(FIGURE_IDS))
