"""Experiment configuration: a TOML-compatible key/value format.

User-facing units are ordinary frequencies in MHz and times in us, with
the unit spelled out in each key name (delta_mhz, tau_us, ...).  The
loader multiplies frequencies by 2 pi once, so everything downstream is
angular.  Parsing is strict: unknown sections or keys fail with the line
number where they appear, and every run embeds its resolved
configuration as comment lines in the output CSV header.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

try:
    import tomllib as _toml
except ModuleNotFoundError:  # python < 3.11
    import tomli as _toml

from ..errors import ConfigError, UsageError
from ..evolve import StepPolicy
from ..noise import DetuningSpec, NoiseSpec
from ..protocols import ProtocolParams
from ..schedules import SweepSchedule

TWO_PI = 2.0 * np.pi

PROTOCOL_KINDS = ("lz", "cd", "ff", "fe")

_SECTIONS = {
    "protocol": {"kind", "delta_mhz", "lambda0_mhz", "tau_us", "sweep",
                 "omega_mhz", "capital_omega", "alpha_mhz", "j1_guard"},
    "policy": {"base_dt_us", "oversample_per_period", "record_stride"},
    "states": {"initial", "target"},
    "noise": {"bandwidth_mhz", "gamma_rms_mhz", "asd_mhz", "n_tones", "alpha_corr"},
    "detuning": {"sigma_mhz"},
    "ensemble": {"size"},
    "run": {"seed"},
    "scan": {"axis", "grid"},
    "ramsey": {"detuning_mhz", "duration_us", "realizations", "points"},
    "variational": {"matrix_file", "l_max", "omega_rad_per_us", "budget",
                    "restarts", "sweep", "lambda0_rad_per_us", "tau_us"},
}

# scan axes: config key -> section holding it
SCAN_AXES = {
    "delta_mhz": "protocol",
    "lambda0_mhz": "protocol",
    "tau_us": "protocol",
    "omega_mhz": "protocol",
    "capital_omega": "protocol",
    "gamma_rms_mhz": "noise",
    "asd_mhz": "noise",
    "bandwidth_mhz": "noise",
    "sigma_mhz": "detuning",
}

_STATE_NAMES = ("minus_x", "plus_x", "ground")


def _key_line(text: str, key: str) -> str:
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0]
        if key in stripped:
            return f"line {number}"
    return "line unknown"


def _validate_tree(tree: dict, text: str):
    for section, content in tree.items():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}] ({_key_line(text, section)})")
        if not isinstance(content, dict):
            raise ConfigError(f"top-level key {section!r} must be a section ({_key_line(text, section)})")
        for key in content:
            if key not in _SECTIONS[section]:
                raise ConfigError(
                    f"unknown key {key!r} in [{section}] ({_key_line(text, key)})"
                )


def _need(tree: dict, section: str, key: str):
    try:
        return tree[section][key]
    except KeyError:
        raise ConfigError(f"missing required key {key!r} in section [{section}]") from None


def _get(tree: dict, section: str, key: str, default=None):
    return tree.get(section, {}).get(key, default)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated configuration plus the resolved simulation objects."""

    tree: dict
    protocol_kind: str
    params: ProtocolParams
    policy: StepPolicy
    noise: NoiseSpec | None
    detuning: DetuningSpec | None
    ensemble_size: int
    seed: int
    initial_kind: str
    target_kind: str

    @property
    def scan(self) -> dict | None:
        return self.tree.get("scan")

    @property
    def ramsey(self) -> dict | None:
        return self.tree.get("ramsey")

    @property
    def variational(self) -> dict | None:
        return self.tree.get("variational")

    def with_value(self, axis: str, value: float) -> "ExperimentConfig":
        """New config with one numeric user-unit field replaced (re-resolved)."""
        if axis not in SCAN_AXES:
            raise UsageError(
                f"{axis!r} is not a scannable numeric field; choose from "
                f"{sorted(SCAN_AXES)}"
            )
        section = SCAN_AXES[axis]
        tree = {k: dict(v) for k, v in self.tree.items()}
        if section not in tree:
            raise ConfigError(f"scan axis {axis!r} needs section [{section}] in the config")
        tree[section][axis] = float(value)
        if axis == "gamma_rms_mhz":
            tree[section].pop("asd_mhz", None)
        if axis == "asd_mhz":
            tree[section].pop("gamma_rms_mhz", None)
        return _resolve(tree)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        tree = {k: dict(v) for k, v in self.tree.items()}
        tree.setdefault("run", {})["seed"] = int(seed)
        return _resolve(tree)

    def echo_lines(self) -> list:
        """Dotted-key TOML lines that reproduce this config when re-parsed."""
        lines = []
        for section in sorted(self.tree):
            for key in sorted(self.tree[section]):
                value = self.tree[section][key]
                if isinstance(value, str):
                    rendered = f'"{value}"'
                elif isinstance(value, bool):
                    rendered = "true" if value else "false"
                elif isinstance(value, float):
                    rendered = f"{value:.17g}"
                elif isinstance(value, list):
                    rendered = "[" + ", ".join(f"{v:.17g}" for v in value) + "]"
                else:
                    rendered = str(value)
                lines.append(f"{section}.{key} = {rendered}")
        return lines


def _resolve(tree: dict) -> ExperimentConfig:
    kind = _need(tree, "protocol", "kind")
    if kind not in PROTOCOL_KINDS:
        raise ConfigError(f"protocol.kind must be one of {PROTOCOL_KINDS}, got {kind!r}")
    sweep = _get(tree, "protocol", "sweep", "linear")
    try:
        schedule = SweepSchedule(
            kind=sweep,
            lambda0=TWO_PI * float(_need(tree, "protocol", "lambda0_mhz")),
            tau=float(_need(tree, "protocol", "tau_us")),
        )
        omega_mhz = _get(tree, "protocol", "omega_mhz")
        alpha_mhz = _get(tree, "protocol", "alpha_mhz")
        params = ProtocolParams(
            delta=TWO_PI * float(_need(tree, "protocol", "delta_mhz")),
            schedule=schedule,
            omega=None if omega_mhz is None else TWO_PI * float(omega_mhz),
            capital_omega=_get(tree, "protocol", "capital_omega"),
            alpha=None if alpha_mhz is None else TWO_PI * float(alpha_mhz),
            j1_guard=float(_get(tree, "protocol", "j1_guard", 1e-3)),
        )
        policy = StepPolicy(
            base_dt=_get(tree, "policy", "base_dt_us"),
            oversample_per_period=int(_get(tree, "policy", "oversample_per_period", 512)),
            record_stride=int(_get(tree, "policy", "record_stride", 1)),
        )
    except ConfigError:
        raise
    except Exception as exc:  # domain errors from the dataclasses
        raise ConfigError(f"invalid protocol/policy values: {exc}") from exc

    if kind == "fe" and (params.omega is None or params.capital_omega is None):
        raise ConfigError("protocol.kind = 'fe' requires omega_mhz and capital_omega")

    seed = int(_get(tree, "run", "seed", 0))

    noise = None
    if "noise" in tree:
        bw_mhz = float(_need(tree, "noise", "bandwidth_mhz"))
        rms_mhz = _get(tree, "noise", "gamma_rms_mhz")
        asd_mhz = _get(tree, "noise", "asd_mhz")
        if (rms_mhz is None) == (asd_mhz is None):
            raise ConfigError("[noise] needs exactly one of gamma_rms_mhz or asd_mhz")
        if rms_mhz is None:
            rms_mhz = float(asd_mhz) * np.sqrt(bw_mhz)
        try:
            noise = NoiseSpec.from_rms(
                omega_c=TWO_PI * bw_mhz,
                gamma_rms=TWO_PI * float(rms_mhz),
                n_tones=int(_get(tree, "noise", "n_tones", 1000)),
                alpha_corr=float(_get(tree, "noise", "alpha_corr", 1.0)),
                seed=seed,
            )
        except Exception as exc:
            raise ConfigError(f"invalid [noise] values: {exc}") from exc

    detuning = None
    if "detuning" in tree:
        try:
            detuning = DetuningSpec(sigma=TWO_PI * float(_need(tree, "detuning", "sigma_mhz")),
                                    seed=seed)
        except Exception as exc:
            raise ConfigError(f"invalid [detuning] values: {exc}") from exc

    initial_kind = _get(tree, "states", "initial", "minus_x")
    target_kind = _get(tree, "states", "target", "plus_x")
    for label, value in (("initial", initial_kind), ("target", target_kind)):
        if value not in _STATE_NAMES:
            raise ConfigError(f"states.{label} must be one of {_STATE_NAMES}, got {value!r}")

    if "scan" in tree:
        axis = _need(tree, "scan", "axis")
        grid = _need(tree, "scan", "grid")
        if axis not in SCAN_AXES:
            raise ConfigError(f"scan.axis {axis!r} is not a numeric config field; "
                              f"choose from {sorted(SCAN_AXES)}")
        if not isinstance(grid, list) or not all(isinstance(v, (int, float)) for v in grid):
            raise ConfigError("scan.grid must be a list of numbers")

    return ExperimentConfig(
        tree=tree,
        protocol_kind=kind,
        params=params,
        policy=policy,
        noise=noise,
        detuning=detuning,
        ensemble_size=int(_get(tree, "ensemble", "size", 200)),
        seed=seed,
        initial_kind=initial_kind,
        target_kind=target_kind,
    )


def parse_config_text(text: str, origin: str = "<string>") -> ExperimentConfig:
    try:
        tree = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"{origin}: {exc}") from exc
    _validate_tree(tree, text)
    return _resolve(tree)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError:
        raise
    return parse_config_text(text, origin=str(path))


def config_from_echo(comment_lines) -> ExperimentConfig:
    """Rebuild a config from the echo block of a CSV header."""
    text = "\n".join(comment_lines)
    return parse_config_text(text, origin="<echo>")
