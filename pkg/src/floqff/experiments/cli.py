"""Command line interface.

Subcommands: simulate (one protocol run), scan (parameter sweep),
figure <id> (built-in recipe), variational (fit + dense evolve),
ramsey (T2* extraction).  Exit codes: 0 success, 2 usage, 3 config,
4 numerical accuracy, 5 I/O.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .. import __version__
from ..errors import (AccuracyError, ConfigError, FitError, NumericalError,
                      UsageError)
from ..evolve import StepPolicy, evolve, final_fidelity
from ..noise import ramsey_t2star, sample_detuning, sample_noise
from ..protocols import validate_floquet_params
from ..schedules import SweepSchedule, eval_schedule
from ..variational import (evolve_dense, interpolated_drive, load_problem,
                           variational_fit)
from .config import load_config
from .csvio import write_csv
from .figures import _FIELD_BUILDERS, _state_from_kind, run_figure, run_scan

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_ACCURACY = 4
EXIT_IO = 5


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floqff",
        description="Floquet-engineered fast-forward qubit protocols: "
                    "simulation, scans and figure recipes",
    )
    parser.add_argument("--version", action="version", version=f"floqff {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", type=Path, required=config_required,
                       help="TOML configuration file")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads for ensembles")
        p.add_argument("--strict-floquet", action="store_true",
                       help="escalate Floquet parameter warnings to errors")

    p = sub.add_parser("simulate", help="run one protocol and write the fidelity curve")
    common(p)
    p = sub.add_parser("scan", help="sweep one numeric config field ([scan] section)")
    common(p)
    p = sub.add_parser("figure", help="run a built-in figure recipe")
    p.add_argument("figure_id", help="recipe id, e.g. fig3b")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--ensemble-size", type=int, default=None,
                   help="override the default 200 realizations")
    p = sub.add_parser("variational", help="variational drive fit and dense evolution")
    common(p)
    p = sub.add_parser("ramsey", help="simulate a detuned Ramsey experiment and fit T2*")
    common(p)
    return parser


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    if cfg.protocol_kind == "fe":
        report = validate_floquet_params(cfg.params)
        for warning in report.warnings:
            print(f"floqff: warning: {warning}", file=sys.stderr)
        if args.strict_floquet and report.warnings:
            raise ConfigError(
                "strict Floquet validation failed: " + "; ".join(report.warnings)
            )
    return cfg


def _cmd_simulate(args) -> int:
    cfg = _load(args)
    fields = _FIELD_BUILDERS[cfg.protocol_kind](cfg.params)
    noise = sample_noise(cfg.noise, 0) if cfg.noise is not None and cfg.noise.psd > 0 else None
    detuning = sample_detuning(cfg.detuning, 0) if cfg.detuning is not None else None
    initial = _state_from_kind(cfg.initial_kind, cfg.params, final=False)
    target = _state_from_kind(cfg.target_kind, cfg.params, final=True)
    result = evolve(fields, cfg.policy, initial=initial, noise=noise,
                    detuning=detuning, target=target)
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / f"simulate_{cfg.protocol_kind}.csv"
    comments = [f"floqff {__version__}", "config:"] + cfg.echo_lines()
    diag = write_csv(path, {"t_us": result.times, "fidelity": result.fidelities}, comments)
    print(f"wrote {path} ({diag.n_rows} rows); "
          f"final fidelity (40 ns window) = {final_fidelity(result):.6f}")
    return EXIT_OK


def _cmd_scan(args) -> int:
    cfg = _load(args)
    if cfg.scan is None:
        raise UsageError("scan requires a [scan] section with 'axis' and 'grid'")
    args.out.mkdir(parents=True, exist_ok=True)
    axis = cfg.scan["axis"]
    path = args.out / f"scan_{cfg.protocol_kind}_{axis}.csv"
    diag = run_scan(cfg, axis, cfg.scan["grid"], path, threads=args.threads)
    print(f"wrote {path} ({diag.n_rows} rows)")
    if diag.n_nan:
        print(f"floqff: note: {diag.n_nan} empty (NaN) cells", file=sys.stderr)
    return EXIT_OK


def _cmd_figure(args) -> int:
    paths = run_figure(args.figure_id, args.out, seed=args.seed,
                       ensemble_size=args.ensemble_size, threads=args.threads)
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_variational(args) -> int:
    cfg = _load(args)
    section = cfg.variational
    if section is None:
        raise UsageError("variational requires a [variational] section")
    schedule = SweepSchedule(kind=section.get("sweep", "linear"),
                             lambda0=float(section["lambda0_rad_per_us"]),
                             tau=float(section["tau_us"]))
    problem = load_problem(section["matrix_file"], schedule)
    l_max = int(section.get("l_max", 1))
    omega = float(section["omega_rad_per_us"])
    lam_mid, dlam_mid, _ = eval_schedule(schedule, schedule.tau / 2.0)
    fit = variational_fit(problem, float(lam_mid), float(dlam_mid), l_max,
                          budget=int(section.get("budget", 2000)),
                          restarts=int(section.get("restarts", 5)), seed=cfg.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    fit_path = args.out / "variational_fit.csv"
    write_csv(fit_path, {"l": np.arange(fit.ansatz.g.size), "g_l": fit.ansatz.g},
              [f"floqff {__version__}", "config:"] + cfg.echo_lines() + [
                  f"capital_omega = {fit.ansatz.capital_omega:.17g}",
                  f"residual = {fit.residual:.6e}",
                  f"converged = {fit.converged}"])
    drive = interpolated_drive(problem, fit.ansatz.capital_omega, l_max)
    policy = StepPolicy(base_dt=schedule.tau / 2048, oversample_per_period=64,
                        record_stride=8)
    curves = {}
    for name, drv in (("bare", "bare"), ("cd", "cd"), ("fitted", drive)):
        res = evolve_dense(problem, drv, omega=omega if name == "fitted" else None,
                           policy=policy)
        curves[name] = res
    times = curves["fitted"].times
    curve_path = args.out / "variational_curves.csv"
    write_csv(curve_path, {
        "t_us": times,
        "fidelity_bare": np.interp(times, curves["bare"].times, curves["bare"].fidelities),
        "fidelity_cd": np.interp(times, curves["cd"].times, curves["cd"].fidelities),
        "fidelity_fitted": curves["fitted"].fidelities,
    }, [f"floqff {__version__}", "config:"] + cfg.echo_lines())
    print(f"wrote {fit_path} and {curve_path}; fit residual {fit.residual:.3e}")
    return EXIT_OK


def _cmd_ramsey(args) -> int:
    cfg = _load(args)
    section = cfg.ramsey
    if section is None:
        raise UsageError("ramsey requires a [ramsey] section")
    if cfg.noise is None:
        raise UsageError("ramsey requires a [noise] section")
    result = ramsey_t2star(
        cfg.noise,
        ramsey_detuning=2.0 * np.pi * float(section["detuning_mhz"]),
        duration=float(section["duration_us"]),
        n_realizations=int(section.get("realizations", 200)),
        n_points=int(section.get("points", 400)),
    )
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / "ramsey_signal.csv"
    write_csv(path, {"t_us": result.times, "signal": result.signal},
              [f"floqff {__version__}", "config:"] + cfg.echo_lines() + [
                  f"gamma_d_mhz = {result.fit.gamma_d:.17g}",
                  f"gamma_d_err_mhz = {result.fit.gamma_d_err:.17g}",
                  f"t2_star_us = {result.t2_star:.17g}"])
    print(f"wrote {path}; gamma_d = {result.fit.gamma_d:.5f} 1/us "
          f"(T2* = {result.t2_star:.3f} us)")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "scan": _cmd_scan,
    "figure": _cmd_figure,
    "variational": _cmd_variational,
    "ramsey": _cmd_ramsey,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"floqff: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"floqff: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AccuracyError, NumericalError, FitError) as exc:
        print(f"floqff: numerical error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except OSError as exc:
        print(f"floqff: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
