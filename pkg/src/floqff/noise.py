"""Band-limited dephasing noise, ensemble averaging, and Ramsey analysis.

The stochastic process is a sum of N random tones,

    gamma(t) = alpha_corr * sqrt(2 omega_c Gamma / N) * sum_j cos(omega_j t + phi_j)

with omega_j uniform on [0, omega_c) and phi_j uniform on [0, 2 pi), so
the RMS amplitude is sqrt(omega_c Gamma) * alpha_corr.  Draws come from a
counter-based generator keyed on (seed, realization index, stream), which
makes ensembles reproducible and order independent.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from .errors import DomainError, FitError
from .evolve import (MINUS_X, PLUS_X, StepPolicy, _check_resolution,
                     _midpoint_coefficients, propagate_batch)
from .protocols import ControlFields

_STREAM_TONES = 0
_STREAM_DETUNING = 1

DEFAULT_N_TONES = 1000
DEFAULT_ENSEMBLE_SIZE = 200


def _rng(seed: int, index: int, stream: int) -> np.random.Generator:
    # Philox is counter based: the key fixes the stream, no sequential state
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, index, stream))))


@dataclass(frozen=True)
class NoiseSpec:
    """Band-limited white dephasing noise parameters.

    omega_c : angular bandwidth (rad/us), > 0.
    psd : spectral density Gamma (rad/us), >= 0; rms = sqrt(omega_c * psd).
    n_tones : number of random tones per realization.
    alpha_corr : overall amplitude scale for non-ideal filter calibration.
    seed : base seed of the counter-based generator.
    """

    omega_c: float
    psd: float
    n_tones: int = DEFAULT_N_TONES
    alpha_corr: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.omega_c) and self.omega_c > 0):
            raise DomainError(f"omega_c must be positive, got {self.omega_c}")
        if not (np.isfinite(self.psd) and self.psd >= 0):
            raise DomainError(f"psd must be non-negative, got {self.psd}")
        if self.n_tones < 1:
            raise DomainError("n_tones must be >= 1")

    @property
    def gamma_rms(self) -> float:
        return float(np.sqrt(self.omega_c * self.psd) * self.alpha_corr)

    @classmethod
    def from_rms(cls, omega_c: float, gamma_rms: float, **kwargs) -> "NoiseSpec":
        """Build a spec from the nominal RMS amplitude instead of the PSD."""
        if gamma_rms < 0:
            raise DomainError("gamma_rms must be non-negative")
        return cls(omega_c=omega_c, psd=gamma_rms**2 / omega_c, **kwargs)


@dataclass(frozen=True)
class NoiseRealization:
    """One sampled trajectory gamma(t), deterministic given (spec, index)."""

    omegas: np.ndarray
    phases: np.ndarray
    amplitude: float
    index: int

    def gamma(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = self.amplitude * np.cos(t[:, None] * self.omegas[None, :] + self.phases).sum(axis=1)
        return out if out.size > 1 else float(out[0])

    def phase_integral(self, t):
        """Exact integral of gamma from 0 to t (closed form per tone)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        om = self.omegas
        safe = np.where(om > 0, om, 1.0)
        per_tone = np.where(
            om > 0,
            (np.sin(t[:, None] * om[None, :] + self.phases) - np.sin(self.phases)) / safe,
            t[:, None] * np.cos(self.phases),
        )
        out = self.amplitude * per_tone.sum(axis=1)
        return out if out.size > 1 else float(out[0])


def sample_noise(spec: NoiseSpec, index: int) -> NoiseRealization:
    """Draw realization number `index` of the noise process."""
    gen = _rng(spec.seed, index, _STREAM_TONES)
    omegas = gen.uniform(0.0, spec.omega_c, spec.n_tones)
    phases = gen.uniform(0.0, 2.0 * np.pi, spec.n_tones)
    amplitude = spec.alpha_corr * np.sqrt(2.0 * spec.omega_c * spec.psd / spec.n_tones)
    return NoiseRealization(omegas=omegas, phases=phases, amplitude=float(amplitude), index=index)


def _gamma_batch(realizations, t0: float, dt: float, n: int) -> np.ndarray:
    """gamma(t) for several realizations on the uniform grid t0 + k dt.

    Uses the rotation recurrence cos(w (t+dt) + p) = Re[z r] with
    z = e^{i(w t + p)}, r = e^{i w dt}, avoiding one cosine per
    (tone, time) pair; the unit-modulus drift over n steps is O(n eps).
    Returns an (n, M) array.
    """
    if not realizations:
        return np.empty((n, 0))
    om = np.stack([r.omegas for r in realizations])      # (M, N)
    ph = np.stack([r.phases for r in realizations])
    amp = np.array([r.amplitude for r in realizations])  # (M,)
    z = np.exp(1j * (om * t0 + ph))
    rot = np.exp(1j * om * dt)
    out = np.empty((n, len(realizations)))
    for k in range(n):
        out[k] = z.real.sum(axis=1)
        z *= rot
    return out * amp[None, :]


@dataclass(frozen=True)
class DetuningSpec:
    """Gaussian quasi-static detuning delta on sigma_z (rad/us std)."""

    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise DomainError(f"sigma must be non-negative, got {self.sigma}")


def sample_detuning(spec: DetuningSpec, index: int) -> float:
    return float(_rng(spec.seed, index, _STREAM_DETUNING).normal(0.0, spec.sigma))


@dataclass(frozen=True)
class EnsembleResult:
    """Per-time mean / std / standard error over noise realizations."""

    times: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    sem: np.ndarray
    n_realizations: int
    meta: dict = field(default_factory=dict)

    def final_fidelity(self, window: float = 0.04):
        """(mean, sem) of the window-averaged final fidelity."""
        mask = self.times >= self.times[-1] - window - 1e-12
        return float(self.mean[mask].mean()), float(self.sem[mask].mean())


def noisy_ensemble(fields: ControlFields, spec: NoiseSpec,
                   det: "DetuningSpec | None" = None,
                   n_realizations: int = DEFAULT_ENSEMBLE_SIZE,
                   policy: StepPolicy | None = None,
                   initial: np.ndarray = MINUS_X, target: np.ndarray = PLUS_X,
                   threads: int = 1) -> EnsembleResult:
    """Average the fidelity curve over independent noise / detuning draws.

    Realizations are independent (fresh tone and detuning draws per index)
    and may be evaluated concurrently; the reduction runs in index order,
    so results are bit-identical for fixed seeds regardless of thread
    count.
    """
    if n_realizations < 2:
        raise DomainError("ensemble needs at least 2 realizations")
    policy = policy or StepPolicy()
    n_steps = policy.step_count(fields.tau, fields.omega)
    dt, t_mid, ax, ay, az_base = _midpoint_coefficients(fields, n_steps)
    _check_resolution(dt, ax, ay, az_base)

    az = np.tile(az_base[:, None], (1, n_realizations))
    if spec.psd > 0:
        realizations = [sample_noise(spec, i) for i in range(n_realizations)]
        if threads > 1:
            # chunk the batch; trajectories are keyed per index, so the
            # assembled matrix does not depend on the chunking
            bounds = np.linspace(0, n_realizations, threads + 1, dtype=int)
            chunks = [realizations[a:b] for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(
                    lambda ch: _gamma_batch(ch, float(t_mid[0]), dt, n_steps), chunks))
            az += np.concatenate(parts, axis=1)
        else:
            az += _gamma_batch(realizations, float(t_mid[0]), dt, n_steps)
    if det is not None and det.sigma > 0:
        az += np.array([sample_detuning(det, i) for i in range(n_realizations)])[None, :]
    fids, _ = propagate_batch(ax, ay, az, dt, initial, np.asarray(target, dtype=complex))

    times = np.arange(n_steps + 1) * dt
    stride = policy.record_stride
    keep = list(range(0, n_steps + 1, stride))
    if keep[-1] != n_steps:
        keep.append(n_steps)
    fids = fids[keep]
    times = times[keep]
    mean = fids.mean(axis=1)
    std = fids.std(axis=1, ddof=1)
    sem = std / np.sqrt(n_realizations)
    meta = {
        "label": fields.label,
        "n_steps": n_steps,
        "dt": dt,
        "noise": spec,
        "detuning": det,
        "n_realizations": n_realizations,
    }
    return EnsembleResult(times=times, mean=mean, std=std, sem=sem,
                          n_realizations=n_realizations, meta=meta)


@dataclass(frozen=True)
class FitResult:
    """Damped-cosine fit A exp(-gamma_d t) cos(freq t + phase) + offset."""

    amplitude: float
    gamma_d: float
    frequency: float
    phase: float
    offset: float
    gamma_d_err: float
    residual: float
    degenerate: bool = False

    def as_tuple(self):
        return (self.amplitude, self.gamma_d, self.frequency, self.phase, self.offset)


def _damped_cosine(t, a, g, f, ph, c):
    return a * np.exp(-g * t) * np.cos(f * t + ph) + c


def fit_decay_envelope(times: np.ndarray, signal: np.ndarray) -> FitResult:
    """Least-squares fit of a decaying fringe signal.

    Initial frequency guess comes from the FFT peak of the detrended
    signal.  A signal with no discernible oscillation is flagged
    degenerate (gamma_d ~ 0, frequency meaningless) instead of fitted.
    """
    times = np.asarray(times, dtype=float)
    signal = np.asarray(signal, dtype=float)
    if len(times) < 10:
        raise DomainError("need at least 10 samples to fit")
    offset0 = float(signal.mean())
    detrended = signal - offset0
    amp0 = float(np.max(np.abs(detrended)))
    if amp0 < 1e-12 * max(1.0, abs(offset0)):
        return FitResult(0.0, 0.0, 0.0, 0.0, offset0, 0.0,
                         float(np.sqrt(np.mean(detrended**2))), degenerate=True)
    spectrum = np.abs(np.fft.rfft(detrended))
    freqs = 2.0 * np.pi * np.fft.rfftfreq(len(times), d=times[1] - times[0])
    f0 = float(freqs[int(np.argmax(spectrum[1:])) + 1])
    p0 = [amp0, 1.0 / times[-1], f0, 0.0, offset0]
    try:
        popt, pcov = curve_fit(_damped_cosine, times, signal, p0=p0, maxfev=20000)
    except RuntimeError as exc:
        raise FitError(f"damped-cosine fit did not converge: {exc}",
                       residuals=signal - _damped_cosine(times, *p0)) from exc
    resid = signal - _damped_cosine(times, *popt)
    gerr = float(np.sqrt(np.abs(pcov[1, 1])))
    a, g, f, ph, c = (float(v) for v in popt)
    # absorb a negative fitted decay of a flat tail into the degenerate flag
    return FitResult(a, g, f, ph, c, gerr, float(np.sqrt(np.mean(resid**2))))


@dataclass(frozen=True)
class RamseyResult:
    """Ensemble-averaged detuned Ramsey fringe and its fitted decay."""

    times: np.ndarray
    signal: np.ndarray
    fit: FitResult

    @property
    def gamma_d(self) -> float:
        return self.fit.gamma_d

    @property
    def t2_star(self) -> float:
        return np.inf if self.fit.gamma_d == 0 else 1.0 / self.fit.gamma_d


def ramsey_t2star(spec: NoiseSpec, ramsey_detuning: float, duration: float,
                  n_realizations: int = DEFAULT_ENSEMBLE_SIZE,
                  n_points: int = 400) -> RamseyResult:
    """Simulated detuned Ramsey experiment under the dephasing process.

    Free evolution under (delta_R + gamma(t)) sigma_z between two x-basis
    projections gives the fringe P(t) = cos^2(delta_R t + Phi(t)) with
    Phi the exact phase integral of gamma.  The ensemble mean is fitted
    to A exp(-gamma_d t) cos(f t + phi) + c.
    """
    if ramsey_detuning <= 0:
        raise DomainError("ramsey_detuning must be positive")
    # fringe angular frequency is 2 delta_R; require >= 5 full fringes
    if duration * ramsey_detuning / np.pi < 5.0:
        raise DomainError(
            f"duration {duration} us too short for 5 fringes at detuning "
            f"{ramsey_detuning} rad/us"
        )
    times = np.linspace(0.0, duration, n_points)
    acc = np.zeros(n_points)
    for index in range(n_realizations):
        phi = sample_noise(spec, index).phase_integral(times) if spec.psd > 0 else 0.0
        acc += 0.5 * (1.0 + np.cos(2.0 * ramsey_detuning * times + 2.0 * phi))
    signal = acc / n_realizations
    fit = fit_decay_envelope(times, signal)
    return RamseyResult(times=times, signal=signal, fit=fit)


@dataclass(frozen=True)
class SpectralProfile:
    """One-sided amplitude spectrum of a protocol's sigma_z waveform."""

    omegas: np.ndarray
    amplitude: np.ndarray
    knee_prediction: float | None

    def peak_omega(self, omega_min: float = 0.0) -> float:
        mask = self.omegas >= omega_min
        return float(self.omegas[mask][int(np.argmax(self.amplitude[mask]))])

    def half_width_at_half_max(self, center: float) -> float:
        """HWHM of the spectral peak nearest `center` (upper side)."""
        i0 = int(np.argmin(np.abs(self.omegas - center)))
        peak = self.amplitude[i0]
        above = self.amplitude[i0:]
        below_idx = np.flatnonzero(above < 0.5 * peak)
        if len(below_idx) == 0:
            raise DomainError("spectrum does not fall below half maximum")
        return float(self.omegas[i0 + below_idx[0]] - self.omegas[i0])


def spectral_profile(fields: ControlFields, n_samples: int = 4096) -> SpectralProfile:
    """Discrete amplitude spectrum of bz(t) over the protocol window.

    For modulated protocols also returns the analytic knee prediction
    omega - lambda0 / (tau * gap), with the effective rotating-frame gap
    if the fields carry one; None for unmodulated protocols.
    """
    if n_samples < 1024 or (n_samples & (n_samples - 1)) != 0:
        raise DomainError(f"n_samples must be a power of two >= 1024, got {n_samples}")
    dt = fields.tau / n_samples
    t = np.arange(n_samples) * dt
    wave = np.asarray(fields.bz(t), dtype=float)
    amp = np.abs(np.fft.rfft(wave)) / n_samples
    omegas = 2.0 * np.pi * np.fft.rfftfreq(n_samples, d=dt)
    knee = None
    if fields.omega is not None and "lambda0" in fields.meta:
        gap = fields.meta.get("effective_gap", fields.meta.get("delta"))
        knee = float(fields.omega - abs(fields.meta["lambda0"]) / (fields.tau * gap))
    return SpectralProfile(omegas=omegas, amplitude=amp, knee_prediction=knee)
