import numpy as np
import pytest

from floqff.errors import DomainError
from floqff.evolve import StepPolicy, evolve
from floqff.noise import (DetuningSpec, NoiseSpec, fit_decay_envelope,
                          noisy_ensemble, ramsey_t2star, sample_detuning,
                          sample_noise, spectral_profile, _gamma_batch)
from floqff.protocols import ProtocolParams, fe_effective_gap, fe_fields, lz_fields
from floqff.schedules import SweepSchedule

TWO_PI = 2 * np.pi


def bench_params():
    return ProtocolParams(delta=TWO_PI * 0.1,
                          schedule=SweepSchedule("linear", TWO_PI * 1.5, 6.0),
                          omega=TWO_PI * 6.0, capital_omega=np.pi / 4)


def test_zero_psd_gives_zero_noise():
    spec = NoiseSpec(omega_c=TWO_PI * 2.5, psd=0.0, seed=1)
    real = sample_noise(spec, 0)
    assert np.allclose(real.gamma(np.linspace(0, 10, 50)), 0.0)


def test_single_tone_amplitude():
    spec = NoiseSpec(omega_c=TWO_PI * 1.0, psd=0.5, n_tones=1, seed=2)
    real = sample_noise(spec, 0)
    expected = np.sqrt(2 * spec.omega_c * spec.psd)
    ts = np.linspace(0, 200, 20001)
    values = real.gamma(ts)
    assert np.max(np.abs(values)) == pytest.approx(expected, rel=1e-3)
    assert np.allclose(values, expected * np.cos(real.omegas[0] * ts + real.phases[0]))


def test_rms_identity():
    # bandwidth 2.5 MHz, rms chosen on the fig-4a axis scale
    spec = NoiseSpec.from_rms(omega_c=TWO_PI * 2.5, gamma_rms=TWO_PI * 0.1, seed=3)
    assert spec.gamma_rms == pytest.approx(TWO_PI * 0.1)
    ts = np.linspace(0.0, 1000.0, 200001)
    values = sample_noise(spec, 0).gamma(ts)
    measured = np.sqrt(np.mean(values**2))
    assert measured == pytest.approx(spec.gamma_rms, rel=0.05)
    assert abs(np.mean(values)) < 0.02 * spec.gamma_rms  # stationarity


def test_alpha_corr_scales_amplitude():
    base = NoiseSpec.from_rms(TWO_PI * 2.5, TWO_PI * 0.1, seed=4)
    scaled = NoiseSpec.from_rms(TWO_PI * 2.5, TWO_PI * 0.1, alpha_corr=1.28, seed=4)
    ts = np.linspace(0, 10, 101)
    assert np.allclose(sample_noise(scaled, 0).gamma(ts),
                       1.28 * sample_noise(base, 0).gamma(ts))


def test_realizations_deterministic_and_independent():
    spec = NoiseSpec.from_rms(TWO_PI * 2.5, TWO_PI * 0.1, seed=5)
    a1 = sample_noise(spec, 7)
    a2 = sample_noise(spec, 7)
    assert np.array_equal(a1.omegas, a2.omegas) and np.array_equal(a1.phases, a2.phases)
    b = sample_noise(spec, 8)
    assert not np.array_equal(a1.omegas, b.omegas)


def test_gamma_batch_matches_direct_evaluation():
    spec = NoiseSpec.from_rms(TWO_PI * 2.5, TWO_PI * 0.2, n_tones=100, seed=6)
    reals = [sample_noise(spec, i) for i in range(3)]
    dt = 0.003
    grid = 0.5 * dt + np.arange(500) * dt
    batch = _gamma_batch(reals, float(grid[0]), dt, len(grid))
    for i, real in enumerate(reals):
        assert np.allclose(batch[:, i], real.gamma(grid), atol=1e-10)


def test_phase_integral_is_exact():
    spec = NoiseSpec.from_rms(TWO_PI * 1.0, TWO_PI * 0.05, n_tones=20, seed=7)
    real = sample_noise(spec, 0)
    for t in (0.7, 2.3):
        dense = np.linspace(0.0, t, 200001)
        oracle = np.trapezoid(real.gamma(dense), dense)
        assert real.phase_integral(t) == pytest.approx(oracle, abs=1e-6)
    assert real.phase_integral(0.0) == 0.0


def test_ensemble_zero_noise_equals_clean_run():
    params = bench_params()
    fields = lz_fields(params)
    policy = StepPolicy(base_dt=6.0 / 1024)
    spec = NoiseSpec(omega_c=TWO_PI * 2.5, psd=0.0, seed=1)
    ens = noisy_ensemble(fields, spec, n_realizations=4, policy=policy)
    clean = evolve(fields, policy)
    # identical columns: zero spread, mean equal to the clean curve up to
    # batched-vs-scalar float association
    assert np.allclose(ens.mean, clean.fidelities, atol=1e-12, rtol=0)
    assert np.all(ens.std == 0.0)


def test_ensemble_determinism_and_threads():
    params = bench_params()
    fields = fe_fields(params)
    policy = StepPolicy(base_dt=6.0 / 512, oversample_per_period=32)
    spec = NoiseSpec.from_rms(TWO_PI * 2.5, TWO_PI * 0.1, n_tones=64, seed=9)
    a = noisy_ensemble(fields, spec, n_realizations=8, policy=policy)
    b = noisy_ensemble(fields, spec, n_realizations=8, policy=policy)
    c = noisy_ensemble(fields, spec, n_realizations=8, policy=policy, threads=3)
    assert np.array_equal(a.mean, b.mean)
    assert np.array_equal(a.mean, c.mean)
    assert np.array_equal(a.std, c.std)


def test_ensemble_needs_two_realizations():
    spec = NoiseSpec.from_rms(TWO_PI * 2.5, TWO_PI * 0.1, seed=9)
    with pytest.raises(DomainError):
        noisy_ensemble(lz_fields(bench_params()), spec, n_realizations=1)


def test_detuning_sampling():
    det = DetuningSpec(sigma=TWO_PI * 0.008, seed=11)
    draws = np.array([sample_detuning(det, i) for i in range(4000)])
    assert sample_detuning(det, 5) == draws[5]
    assert np.std(draws) == pytest.approx(det.sigma, rel=0.05)
    assert abs(np.mean(draws)) < 0.05 * det.sigma


def test_detuning_only_ensemble_ordering():
    # quick sanity version of the detuning-band ordering (lz most sensitive)
    params = bench_params()
    det = DetuningSpec(sigma=TWO_PI * 0.008, seed=12)
    spec = NoiseSpec(omega_c=TWO_PI * 2.5, psd=0.0, seed=12)
    policy = StepPolicy(base_dt=6.0 / 1024)
    stds = {}
    for name, build in (("lz", lz_fields), ("fe", fe_fields)):
        pol = StepPolicy(base_dt=6.0 / 512, oversample_per_period=32) if name == "fe" else policy
        ens = noisy_ensemble(build(params), spec, det=det, n_realizations=24, policy=pol)
        stds[name] = ens.std[-1]
    assert stds["lz"] > stds["fe"]


def test_fit_decay_envelope_exact_roundtrip():
    ts = np.linspace(0, 20, 600)
    signal = 0.47 * np.exp(-0.125 * ts) * np.cos(2 * np.pi * 0.9 * ts + 0.4) + 0.5
    fit = fit_decay_envelope(ts, signal)
    assert fit.amplitude == pytest.approx(0.47, abs=1e-8)
    assert fit.gamma_d == pytest.approx(0.125, abs=1e-8)
    assert fit.frequency == pytest.approx(2 * np.pi * 0.9, abs=1e-8)
    assert fit.offset == pytest.approx(0.5, abs=1e-8)
    assert fit.residual < 1e-10


def test_fit_decay_envelope_with_jitter():
    rng = np.random.default_rng(13)
    ts = np.linspace(0, 20, 600)
    clean = 0.5 * np.exp(-0.2 * ts) * np.cos(2 * np.pi * 1.1 * ts) + 0.5
    fit = fit_decay_envelope(ts, clean + rng.normal(0, 0.005, ts.size))
    assert fit.gamma_d == pytest.approx(0.2, rel=0.05)


def test_fit_decay_envelope_degenerate_constant():
    ts = np.linspace(0, 10, 200)
    fit = fit_decay_envelope(ts, np.full(200, 0.73))
    assert fit.degenerate
    assert fit.gamma_d == pytest.approx(0.0, abs=1e-12)


def test_fit_decay_envelope_needs_samples():
    with pytest.raises(DomainError):
        fit_decay_envelope(np.linspace(0, 1, 5), np.zeros(5))


def test_ramsey_zero_noise_rate_is_zero():
    spec = NoiseSpec(omega_c=TWO_PI * 2.5, psd=0.0, seed=14)
    res = ramsey_t2star(spec, ramsey_detuning=TWO_PI * 0.5, duration=10.0,
                        n_realizations=4)
    assert abs(res.gamma_d) <= max(3 * res.fit.gamma_d_err, 1e-6)
    # fringe frequency is 2 * detuning under the sigma_z convention
    assert res.fit.frequency == pytest.approx(2 * TWO_PI * 0.5, rel=1e-3)


def test_ramsey_duration_precondition():
    spec = NoiseSpec(omega_c=TWO_PI * 2.5, psd=0.0, seed=14)
    with pytest.raises(DomainError):
        ramsey_t2star(spec, ramsey_detuning=TWO_PI * 0.5, duration=1.0)


def test_spectral_profile_lz_is_dc():
    prof = spectral_profile(lz_fields(bench_params()), 2048)
    assert prof.peak_omega() == 0.0
    assert prof.knee_prediction is None


def test_spectral_profile_fe_peak_and_width():
    params = bench_params()
    prof = spectral_profile(fe_fields(params), 4096)
    resolution = TWO_PI / 6.0
    assert abs(prof.peak_omega(omega_min=TWO_PI * 1.0) - TWO_PI * 6.0) <= resolution
    # measured half width vs the analytic exponential decay's half width
    gap = fe_effective_gap(params)
    predicted_hwhm = 2 * np.log(2) * params.schedule.lambda0 / (6.0 * gap)
    measured = prof.half_width_at_half_max(TWO_PI * 6.0)
    assert 0.5 * predicted_hwhm <= measured <= 1.5 * predicted_hwhm
    # knee prediction omega - lambda0 / (tau * effective gap)
    expected_knee = TWO_PI * 6.0 - params.schedule.lambda0 / (6.0 * gap)
    assert prof.knee_prediction == pytest.approx(expected_knee)


def test_spectral_profile_validates_length():
    with pytest.raises(DomainError):
        spectral_profile(lz_fields(bench_params()), 1000)
    with pytest.raises(DomainError):
        spectral_profile(lz_fields(bench_params()), 3000)
