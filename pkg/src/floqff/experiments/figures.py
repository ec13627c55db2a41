"""Figure recipes: parameter sets reproducing the numerical studies.

Each recipe is data (a FigureRecipe with a parameter dict); run_figure
dispatches on the recipe kind and writes one CSV per curve, each with a
resolved-parameter comment header.  Runs are deterministic for a fixed
master seed: all stochastic draws are keyed on (seed, realization index,
stream).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import __version__
from ..errors import SingularityError, UsageError
from ..evolve import (MINUS_X, PLUS_X, StepPolicy, evolve, final_fidelity,
                      ground_state)
from ..noise import DetuningSpec, NoiseSpec, noisy_ensemble, ramsey_t2star
from ..numerics import bessel_j, bessel_j1_zeros
from ..protocols import (ProtocolParams, cd_fields, fe_effective_gap,
                         fe_fields, ff_fields, lz_fields)
from ..schedules import SweepSchedule
from .csvio import write_csv

TWO_PI = 2.0 * np.pi

# benchmark qubit parameters shared by most panels
_BENCH = {"delta_mhz": 0.1, "lambda0_mhz": 1.5, "tau_us": 6.0,
          "omega_mhz": 6.0, "capital_omega": np.pi / 4.0, "sweep": "linear"}
# high-frequency-scaling parameters: delta is chosen so the rotating-frame
# gap delta * J0(2 Omega) equals 2 pi * 0.1 rad/us
_SCALING_DELTA_MHZ = 0.1 / bessel_j(0, 2.0 * np.pi)

_FIELD_BUILDERS = {"lz": lz_fields, "cd": cd_fields, "ff": ff_fields, "fe": fe_fields}


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    kind: str
    description: str
    params: dict


FIGURE_RECIPES = {
    "fig1b": FigureRecipe(
        "fig1b", "duration_scan",
        "Qualitative fidelity vs protocol duration for lz/ff/fe under dephasing "
        "noise calibrated to T2* ~ 8 us (stand-in values; the reference panel "
        "does not pin them numerically)",
        {
            "protocols": ("lz", "ff", "fe"),
            "proto": dict(_BENCH),
            "tau_grid_us": (0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0,
                            6.0, 8.0, 12.0, 16.0, 24.0, 32.0),
            "noise": {"bandwidth_mhz": 2.5, "gamma_rms_mhz": 0.089,
                      "n_tones": 400, "alpha_corr": 1.0},
            "t2_tick_us": 8.0,
        },
    ),
    "fig2": FigureRecipe(
        "fig2", "floquet_scan",
        "Infidelity of the Floquet-engineered protocol vs drive frequency, "
        "stroboscopically sampled (omega tau = n pi), cubic sweep",
        {
            "proto": {"delta_mhz": _SCALING_DELTA_MHZ, "lambda0_mhz": 1.5,
                      "tau_us": 6.0, "capital_omega": np.pi, "sweep": "cubic"},
            "n_half_periods": (12, 16, 24, 32, 48, 72, 96, 144, 240, 480),
            # the power-law slope is fitted on the asymptotic tail, above
            # the low-frequency Floquet resonances
            "slope_window_mhz": (6.0, 40.0),
        },
    ),
    "fig3b": FigureRecipe(
        "fig3b", "fidelity_curves",
        "Noiseless fidelity curves for the lz, ff and fe protocols at the "
        "benchmark parameters",
        {"protocols": ("lz", "ff", "fe"), "proto": dict(_BENCH)},
    ),
    "fig4a": FigureRecipe(
        "fig4a", "noise_scan",
        "Final fidelity vs noise RMS amplitude at fixed 2.5 MHz bandwidth",
        {
            "protocols": ("ff", "fe"),
            "proto": dict(_BENCH),
            "axis": "gamma_rms_mhz",
            "grid": (0.01, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64, 1.28),
            "noise": {"bandwidth_mhz": 2.5, "n_tones": 1000, "alpha_corr": 1.28},
        },
    ),
    "fig4b": FigureRecipe(
        "fig4b", "noise_scan",
        "Final fidelity vs noise bandwidth at fixed spectral density "
        "0.079 MHz/sqrt(MHz)",
        {
            "protocols": ("ff", "fe"),
            "proto": dict(_BENCH),
            "axis": "bandwidth_mhz",
            "grid": (0.32, 0.64, 1.28, 2.56, 5.12, 8.0, 12.0),
            "noise": {"asd_mhz": 0.079, "n_tones": 1000, "alpha_corr": 1.0},
        },
    ),
    "fig4c": FigureRecipe(
        "fig4c", "noise_scan",
        "Final fidelity vs protocol duration at 640 kHz bandwidth and "
        "64 kHz RMS",
        {
            "protocols": ("ff", "fe"),
            "proto": dict(_BENCH),
            "axis": "tau_us",
            "grid": (0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0),
            "noise": {"bandwidth_mhz": 0.64, "gamma_rms_mhz": 0.064,
                      "n_tones": 1000, "alpha_corr": 1.28},
        },
    ),
    "supp-omega": FigureRecipe(
        "supp-omega", "omega_scan_static",
        "Infidelity of the initial fe ground state with |-x> as a function "
        "of Omega; guard-band points near J1(2 Omega) = 0 are left empty",
        {"proto": dict(_BENCH), "omega_grid": (0.05, 4.0, 0.01),
         "include_j1_zeros": True},
    ),
    "supp-detuning": FigureRecipe(
        "supp-detuning", "detuning_curves",
        "Fidelity bands under Gaussian quasi-static detuning (sigma = 8 kHz) "
        "for the lz, ff and fe protocols",
        {"protocols": ("lz", "ff", "fe"), "proto": dict(_BENCH),
         "sigma_mhz": 0.008},
    ),
    "supp-ramsey": FigureRecipe(
        "supp-ramsey", "ramsey_scan",
        "Fitted Ramsey decay rate vs noise RMS (fixed 2.5 MHz bandwidth) and "
        "vs bandwidth (fixed spectral density)",
        {
            "rms_grid_mhz": (0.03, 0.06, 0.125, 0.25, 0.5),
            "rms_bandwidth_mhz": 2.5,
            "bandwidth_grid_mhz": (0.64, 1.28, 2.56, 5.12),
            "bandwidth_asd_mhz": 0.079,
            "detuning_mhz": 0.5,
            "duration_us": 20.0,
            "n_tones": 1000,
        },
    ),
    "supp-dd-a": FigureRecipe(
        "supp-dd-a", "dd_scan",
        "fe infidelity vs stroboscopic drive frequency for several noise "
        "bandwidths at equal spectral density, with ff baselines",
        {
            "proto": {"delta_mhz": _SCALING_DELTA_MHZ, "lambda0_mhz": 1.5,
                      "tau_us": 4.0, "capital_omega": np.pi, "sweep": "cubic"},
            "n_periods": (6, 8, 10, 12, 14, 16, 20, 24, 28, 32, 48, 64),
            "bandwidths_mhz": (1.28, 2.56, 5.12),
            "mode": "fixed_psd",
            "asd_mhz": 0.079,
            "n_tones": 400,
        },
    ),
    "supp-dd-b": FigureRecipe(
        "supp-dd-b", "dd_scan",
        "Same scan as supp-dd-a but at constant noise RMS amplitude",
        {
            "proto": {"delta_mhz": _SCALING_DELTA_MHZ, "lambda0_mhz": 1.5,
                      "tau_us": 4.0, "capital_omega": np.pi, "sweep": "cubic"},
            "n_periods": (6, 8, 10, 12, 14, 16, 20, 24, 28, 32, 48, 64),
            "bandwidths_mhz": (1.28, 2.56, 5.12),
            "mode": "fixed_rms",
            "gamma_rms_mhz": 0.126,
            "n_tones": 400,
        },
    ),
}


def _tag(recipe: FigureRecipe) -> str:
    return recipe.figure_id.replace("-", "_")


def _build_params(proto: dict, **overrides) -> ProtocolParams:
    merged = dict(proto, **overrides)
    schedule = SweepSchedule(kind=merged.get("sweep", "linear"),
                             lambda0=TWO_PI * merged["lambda0_mhz"],
                             tau=merged["tau_us"])
    omega_mhz = merged.get("omega_mhz")
    return ProtocolParams(
        delta=TWO_PI * merged["delta_mhz"],
        schedule=schedule,
        omega=None if omega_mhz is None else TWO_PI * omega_mhz,
        capital_omega=merged.get("capital_omega"),
    )


def _ensemble_policy(kind: str, params: ProtocolParams) -> StepPolicy:
    # Monte Carlo spread dominates stepping bias, so ensembles run with a
    # lighter grid than the noiseless default
    if kind == "fe":
        return StepPolicy(base_dt=params.schedule.tau / 1024, oversample_per_period=64)
    return StepPolicy(base_dt=params.schedule.tau / 2048)


def _curve_stride(n_steps: int, max_rows: int = 1024) -> int:
    return max(1, n_steps // max_rows)


def _noise_spec(noise_params: dict, seed: int, bandwidth_mhz=None,
                gamma_rms_mhz=None) -> NoiseSpec:
    bw = bandwidth_mhz if bandwidth_mhz is not None else noise_params["bandwidth_mhz"]
    if gamma_rms_mhz is None:
        if "gamma_rms_mhz" in noise_params:
            gamma_rms_mhz = noise_params["gamma_rms_mhz"]
        else:
            gamma_rms_mhz = noise_params["asd_mhz"] * np.sqrt(bw)
    return NoiseSpec.from_rms(
        omega_c=TWO_PI * bw,
        gamma_rms=TWO_PI * gamma_rms_mhz,
        n_tones=noise_params.get("n_tones", 1000),
        alpha_corr=noise_params.get("alpha_corr", 1.0),
        seed=seed,
    )


def _comments(recipe: FigureRecipe, seed: int, extra=()) -> list:
    lines = [f"floqff {__version__}", f"figure = \"{recipe.figure_id}\"",
             f"seed = {seed}", f"description = \"{recipe.description}\""]
    lines.extend(extra)
    return lines


def _proto_comment(proto: dict) -> list:
    return [f"protocol.{k} = {v!r}" for k, v in sorted(proto.items())]


def _run_fidelity_curves(recipe, out_dir, seed, ensemble_size, threads):
    paths = []
    for kind in recipe.params["protocols"]:
        params = _build_params(recipe.params["proto"])
        fields = _FIELD_BUILDERS[kind](params)
        policy = StepPolicy()
        n_steps = policy.step_count(fields.tau, fields.omega)
        policy = StepPolicy(record_stride=_curve_stride(n_steps))
        result = evolve(fields, policy)
        path = Path(out_dir) / f"{_tag(recipe)}_{kind}.csv"
        write_csv(path, {"t_us": result.times, "fidelity": result.fidelities},
                  _comments(recipe, seed, [f"protocol.kind = '{kind}'"]
                            + _proto_comment(recipe.params["proto"])))
        paths.append(path)
    return paths


def _run_duration_scan(recipe, out_dir, seed, ensemble_size, threads):
    noise_params = recipe.params["noise"]
    paths = []
    for kind in recipe.params["protocols"]:
        rows = {"tau_us": [], "fidelity_mean": [], "fidelity_std": [], "fidelity_sem": []}
        for tau in recipe.params["tau_grid_us"]:
            params = _build_params(recipe.params["proto"], tau_us=tau)
            fields = _FIELD_BUILDERS[kind](params)
            spec = _noise_spec(noise_params, seed)
            ens = noisy_ensemble(fields, spec, n_realizations=ensemble_size,
                                 policy=_ensemble_policy(kind, params), threads=threads)
            mean, sem = ens.final_fidelity()
            mask = ens.times >= ens.times[-1] - 0.04 - 1e-12
            rows["tau_us"].append(tau)
            rows["fidelity_mean"].append(mean)
            rows["fidelity_std"].append(float(ens.std[mask].mean()))
            rows["fidelity_sem"].append(sem)
        path = Path(out_dir) / f"{_tag(recipe)}_{kind}.csv"
        write_csv(path, rows, _comments(
            recipe, seed,
            [f"protocol.kind = '{kind}'",
             f"noise.bandwidth_mhz = {noise_params['bandwidth_mhz']}",
             f"noise.gamma_rms_mhz = {noise_params['gamma_rms_mhz']}",
             f"t2_tick_us = {recipe.params['t2_tick_us']}"]
            + _proto_comment(recipe.params["proto"])))
        paths.append(path)
    return paths


def _run_floquet_scan(recipe, out_dir, seed, ensemble_size, threads):
    proto = recipe.params["proto"]
    tau = proto["tau_us"]
    oms, infids = [], []
    for n_half in recipe.params["n_half_periods"]:
        omega = n_half * np.pi / tau
        params = _build_params(proto, omega_mhz=omega / TWO_PI)
        fields = fe_fields(params)
        gap = fe_effective_gap(params)
        lam0 = params.schedule.lambda0
        initial = ground_state(gap, lam0)
        target = ground_state(gap, -lam0)
        result = evolve(fields, StepPolicy(record_stride=1024), initial=initial, target=target)
        oms.append(omega / TWO_PI)
        infids.append(1.0 - result.fidelities[-1])
    oms = np.asarray(oms)
    infids = np.asarray(infids)
    lo, hi = recipe.params["slope_window_mhz"]
    mask = (oms >= lo) & (oms <= hi)
    slope = float(np.polyfit(np.log(oms[mask]), np.log(infids[mask]), 1)[0])
    path = Path(out_dir) / f"{_tag(recipe)}_fe.csv"
    write_csv(path, {
        "omega_over_2pi_mhz": oms,
        "n_half_periods": np.asarray(recipe.params["n_half_periods"]),
        "infidelity": infids,
    }, _comments(recipe, seed, [f"loglog_slope = {slope:.6f}",
                                "states = 'effective ground to ground'"]
                 + _proto_comment(proto)))
    return [path]


def _run_noise_scan(recipe, out_dir, seed, ensemble_size, threads):
    axis = recipe.params["axis"]
    noise_params = recipe.params["noise"]
    paths = []
    for kind in recipe.params["protocols"]:
        rows = {axis: [], "fidelity_mean": [], "fidelity_std": [], "fidelity_sem": []}
        for value in recipe.params["grid"]:
            overrides = {}
            spec_kw = {}
            if axis == "tau_us":
                overrides["tau_us"] = value
            elif axis == "gamma_rms_mhz":
                spec_kw["gamma_rms_mhz"] = value
            elif axis == "bandwidth_mhz":
                spec_kw["bandwidth_mhz"] = value
            params = _build_params(recipe.params["proto"], **overrides)
            fields = _FIELD_BUILDERS[kind](params)
            spec = _noise_spec(noise_params, seed, **spec_kw)
            ens = noisy_ensemble(fields, spec, n_realizations=ensemble_size,
                                 policy=_ensemble_policy(kind, params), threads=threads)
            mean, sem = ens.final_fidelity()
            mask = ens.times >= ens.times[-1] - 0.04 - 1e-12
            rows[axis].append(value)
            rows["fidelity_mean"].append(mean)
            rows["fidelity_std"].append(float(ens.std[mask].mean()))
            rows["fidelity_sem"].append(sem)
        path = Path(out_dir) / f"{_tag(recipe)}_{kind}.csv"
        extra = [f"protocol.kind = '{kind}'", f"axis = '{axis}'"]
        extra += [f"noise.{k} = {v}" for k, v in sorted(noise_params.items())]
        write_csv(path, rows, _comments(recipe, seed, extra + _proto_comment(recipe.params["proto"])))
        paths.append(path)
    return paths


def _run_omega_scan_static(recipe, out_dir, seed, ensemble_size, threads):
    start, stop, step = recipe.params["omega_grid"]
    grid = np.arange(start, stop + 0.5 * step, step)
    if recipe.params.get("include_j1_zeros"):
        # drop the scan exactly onto the singular points so the guard band
        # shows up as empty cells in the output
        zeros = np.asarray(bessel_j1_zeros()) / 2.0
        grid = np.sort(np.concatenate([grid, zeros[zeros <= stop]]))
    proto = recipe.params["proto"]
    infids = np.empty_like(grid)
    minus_x = MINUS_X
    for i, cap in enumerate(grid):
        params = _build_params(proto, capital_omega=float(cap))
        try:
            fields = fe_fields(params)
        except SingularityError:
            infids[i] = np.nan
            continue
        gs = ground_state(float(fields.bz(0.0)), float(fields.bx(0.0)))
        infids[i] = 1.0 - float(np.abs(np.vdot(minus_x, gs)) ** 2)
    path = Path(out_dir) / f"{_tag(recipe)}_fe.csv"
    write_csv(path, {"capital_omega": grid, "infidelity": infids},
              _comments(recipe, seed, ["empty cells mark the J1(2 Omega) guard band"]
                        + _proto_comment(proto)))
    return [path]


def _run_detuning_curves(recipe, out_dir, seed, ensemble_size, threads):
    proto = recipe.params["proto"]
    sigma = recipe.params["sigma_mhz"]
    paths = []
    for kind in recipe.params["protocols"]:
        params = _build_params(proto)
        fields = _FIELD_BUILDERS[kind](params)
        policy = _ensemble_policy(kind, params)
        det = DetuningSpec(sigma=TWO_PI * sigma, seed=seed)
        # zero-PSD spec: detuning is the only stochastic ingredient here
        spec = NoiseSpec(omega_c=TWO_PI * 2.5, psd=0.0, seed=seed)
        ens = noisy_ensemble(fields, spec, det=det, n_realizations=ensemble_size,
                             policy=policy, threads=threads)
        clean = evolve(fields, policy)
        stride = _curve_stride(len(ens.times) - 1)
        keep = np.unique(np.r_[np.arange(0, len(ens.times), stride), len(ens.times) - 1])
        path = Path(out_dir) / f"{_tag(recipe)}_{kind}.csv"
        write_csv(path, {
            "t_us": ens.times[keep],
            "fidelity_mean": ens.mean[keep],
            "fidelity_std": ens.std[keep],
            "fidelity_sem": ens.sem[keep],
            "fidelity_nodetuning": clean.fidelities[keep],
        }, _comments(recipe, seed, [f"protocol.kind = '{kind}'",
                                    f"detuning.sigma_mhz = {sigma}"]
                     + _proto_comment(proto)))
        paths.append(path)
    return paths


def _run_ramsey_scan(recipe, out_dir, seed, ensemble_size, threads):
    det = TWO_PI * recipe.params["detuning_mhz"]
    duration = recipe.params["duration_us"]
    n_tones = recipe.params["n_tones"]
    paths = []

    rows = {"gamma_rms_mhz": [], "gamma_d_mhz": [], "gamma_d_err_mhz": []}
    bw = recipe.params["rms_bandwidth_mhz"]
    for rms in recipe.params["rms_grid_mhz"]:
        spec = NoiseSpec.from_rms(TWO_PI * bw, TWO_PI * rms, n_tones=n_tones, seed=seed)
        res = ramsey_t2star(spec, det, duration, n_realizations=ensemble_size)
        rows["gamma_rms_mhz"].append(rms)
        rows["gamma_d_mhz"].append(res.fit.gamma_d)
        rows["gamma_d_err_mhz"].append(res.fit.gamma_d_err)
    path = Path(out_dir) / f"{_tag(recipe)}_rms.csv"
    write_csv(path, rows, _comments(recipe, seed, [f"noise.bandwidth_mhz = {bw}"]))
    paths.append(path)

    rows = {"bandwidth_mhz": [], "gamma_d_mhz": [], "gamma_d_err_mhz": []}
    asd = recipe.params["bandwidth_asd_mhz"]
    for bw in recipe.params["bandwidth_grid_mhz"]:
        spec = NoiseSpec.from_rms(TWO_PI * bw, TWO_PI * asd * np.sqrt(bw),
                                  n_tones=n_tones, seed=seed)
        res = ramsey_t2star(spec, det, duration, n_realizations=ensemble_size)
        rows["bandwidth_mhz"].append(bw)
        rows["gamma_d_mhz"].append(res.fit.gamma_d)
        rows["gamma_d_err_mhz"].append(res.fit.gamma_d_err)
    path = Path(out_dir) / f"{_tag(recipe)}_bandwidth.csv"
    write_csv(path, rows, _comments(recipe, seed, [f"noise.asd_mhz = {asd}"]))
    paths.append(path)
    return paths


def _run_dd_scan(recipe, out_dir, seed, ensemble_size, threads):
    proto = recipe.params["proto"]
    tau = proto["tau_us"]
    n_tones = recipe.params["n_tones"]
    fig_tag = _tag(recipe)
    paths = []

    def rms_for(bw: float) -> float:
        if recipe.params["mode"] == "fixed_psd":
            return recipe.params["asd_mhz"] * np.sqrt(bw)
        return recipe.params["gamma_rms_mhz"]

    # noiseless fe reference curve
    clean_rows = {"omega_over_2pi_mhz": [], "infidelity": []}
    fe_runs = {}
    for n in recipe.params["n_periods"]:
        omega = TWO_PI * n / tau
        params = _build_params(proto, omega_mhz=omega / TWO_PI)
        fields = fe_fields(params)
        gap = fe_effective_gap(params)
        initial = ground_state(gap, params.schedule.lambda0)
        target = ground_state(gap, -params.schedule.lambda0)
        result = evolve(fields, StepPolicy(oversample_per_period=64, record_stride=4096),
                        initial=initial, target=target)
        fe_runs[n] = (params, fields, initial, target)
        clean_rows["omega_over_2pi_mhz"].append(omega / TWO_PI)
        clean_rows["infidelity"].append(1.0 - result.fidelities[-1])
    path = Path(out_dir) / f"{fig_tag}_fe_noiseless.csv"
    write_csv(path, clean_rows, _comments(recipe, seed, _proto_comment(proto)))
    paths.append(path)

    ff_rows = {"bandwidth_mhz": [], "infidelity_mean": [], "infidelity_sem": []}
    for bw in recipe.params["bandwidths_mhz"]:
        rms = rms_for(bw)
        spec = NoiseSpec.from_rms(TWO_PI * bw, TWO_PI * rms, n_tones=n_tones, seed=seed)

        rows = {"omega_over_2pi_mhz": [], "infidelity_mean": [],
                "infidelity_std": [], "infidelity_sem": []}
        for n in recipe.params["n_periods"]:
            params, fields, initial, target = fe_runs[n]
            ens = noisy_ensemble(fields, spec, n_realizations=ensemble_size,
                                 policy=StepPolicy(oversample_per_period=64),
                                 initial=initial, target=target, threads=threads)
            rows["omega_over_2pi_mhz"].append(params.omega / TWO_PI)
            rows["infidelity_mean"].append(1.0 - ens.mean[-1])
            rows["infidelity_std"].append(ens.std[-1])
            rows["infidelity_sem"].append(ens.sem[-1])
        gap = fe_effective_gap(_build_params(proto))
        knee = TWO_PI * bw + _build_params(proto).schedule.lambda0 / (tau * gap)
        tag = f"bw{int(round(bw * 1000))}khz"
        path = Path(out_dir) / f"{fig_tag}_fe_{tag}.csv"
        write_csv(path, rows, _comments(
            recipe, seed,
            [f"noise.bandwidth_mhz = {bw}", f"noise.gamma_rms_mhz = {rms}",
             f"knee_pred_mhz = {knee / TWO_PI:.6f}"] + _proto_comment(proto)))
        paths.append(path)

        # conventional ff baseline at the same noise (no Floquet drive)
        ff_params = _build_params(proto)
        ff = ff_fields(ff_params)
        ens = noisy_ensemble(ff, spec, n_realizations=ensemble_size,
                             policy=_ensemble_policy("ff", ff_params),
                             initial=ground_state(ff_params.delta, ff_params.schedule.lambda0),
                             target=ground_state(ff_params.delta, -ff_params.schedule.lambda0),
                             threads=threads)
        ff_rows["bandwidth_mhz"].append(bw)
        ff_rows["infidelity_mean"].append(1.0 - ens.mean[-1])
        ff_rows["infidelity_sem"].append(ens.sem[-1])
    path = Path(out_dir) / f"{fig_tag}_ff_baseline.csv"
    write_csv(path, ff_rows, _comments(recipe, seed, _proto_comment(proto)))
    paths.append(path)
    return paths


_EXECUTORS = {
    "fidelity_curves": _run_fidelity_curves,
    "duration_scan": _run_duration_scan,
    "floquet_scan": _run_floquet_scan,
    "noise_scan": _run_noise_scan,
    "omega_scan_static": _run_omega_scan_static,
    "detuning_curves": _run_detuning_curves,
    "ramsey_scan": _run_ramsey_scan,
    "dd_scan": _run_dd_scan,
}


def run_figure(figure_id: str, out_dir, seed: int = 0,
               ensemble_size: int | None = None, threads: int = 1) -> list:
    """Execute one figure recipe; returns the list of CSV paths written."""
    if figure_id not in FIGURE_RECIPES:
        raise UsageError(
            f"unknown figure id {figure_id!r}; valid ids: {', '.join(sorted(FIGURE_RECIPES))}"
        )
    recipe = FIGURE_RECIPES[figure_id]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    size = ensemble_size if ensemble_size is not None else 200
    return _EXECUTORS[recipe.kind](recipe, out_dir, seed, size, threads)


def run_scan(config, axis: str, grid, out_path, threads: int = 1):
    """Sweep one numeric config field; one row of final-fidelity stats per value."""
    grid = list(grid)
    if not grid:
        raise UsageError("scan grid is empty")
    rows = {axis: [], "fidelity_mean": [], "fidelity_sem": []}
    for value in grid:
        cfg = config.with_value(axis, float(value))
        fields = _FIELD_BUILDERS[cfg.protocol_kind](cfg.params)
        initial = _state_from_kind(cfg.initial_kind, cfg.params, final=False)
        target = _state_from_kind(cfg.target_kind, cfg.params, final=True)
        if cfg.noise is not None or cfg.detuning is not None:
            spec = cfg.noise or NoiseSpec(omega_c=1.0, psd=0.0, seed=cfg.seed)
            ens = noisy_ensemble(fields, spec, det=cfg.detuning,
                                 n_realizations=cfg.ensemble_size,
                                 policy=cfg.policy, initial=initial,
                                 target=target, threads=threads)
            mean, sem = ens.final_fidelity()
        else:
            mean = final_fidelity(evolve(fields, cfg.policy, initial=initial, target=target))
            sem = 0.0
        rows[axis].append(float(value))
        rows["fidelity_mean"].append(mean)
        rows["fidelity_sem"].append(sem)
    comments = [f"floqff {__version__}", "config:"] + config.echo_lines() + [
        f"scan.axis = '{axis}'"]
    return write_csv(out_path, rows, comments)


def _state_from_kind(kind: str, params: ProtocolParams, final: bool) -> np.ndarray:
    if kind == "minus_x":
        return MINUS_X
    if kind == "plus_x":
        return PLUS_X
    lam0 = params.schedule.lambda0
    return ground_state(params.delta, -lam0 if final else lam0)
