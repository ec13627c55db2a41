import numpy as np
import pytest

from floqff.errors import (AccuracyError, ContractViolationError, DomainError,
                           GridError)
from floqff.evolve import (MINUS_X, PLUS_X, EvolutionResult, StepPolicy,
                           evolve, fidelity, final_fidelity, ground_state,
                           strobe_compare)
from floqff.protocols import (ControlFields, ProtocolParams, cd_fields,
                              fe_effective_gap, fe_fields, ff_fields, lz_fields)
from floqff.schedules import SweepSchedule

TWO_PI = 2 * np.pi
DELTA = TWO_PI * 0.1
LAM0 = TWO_PI * 1.5
TAU = 6.0


def bench_params(**kw):
    defaults = dict(delta=DELTA, schedule=SweepSchedule("linear", LAM0, TAU),
                    omega=TWO_PI * 6.0, capital_omega=np.pi / 4)
    defaults.update(kw)
    return ProtocolParams(**defaults)


def constant_fields(bx=0.0, by=0.0, bz=0.0, tau=1.0, omega=None):
    return ControlFields(
        bx=lambda t: np.full_like(np.asarray(t, float), bx),
        by=lambda t: np.full_like(np.asarray(t, float), by),
        bz=lambda t: np.full_like(np.asarray(t, float), bz),
        tau=tau, label="const", omega=omega)


def test_zero_fields_keep_state():
    result = evolve(constant_fields(), StepPolicy(base_dt=0.01), initial=MINUS_X)
    assert np.allclose(result.states, MINUS_X, atol=1e-15)
    assert np.allclose(result.fidelities, fidelity(MINUS_X, PLUS_X), atol=1e-15)


def test_rabi_oscillation_pattern():
    rabi = TWO_PI * 0.5
    tau = 2.0
    zero = np.array([1.0, 0.0], dtype=complex)
    result = evolve(constant_fields(bx=rabi, tau=tau), StepPolicy(base_dt=1e-3),
                    initial=zero, target=zero)
    assert np.allclose(result.fidelities, np.cos(rabi * result.times) ** 2, atol=1e-9)
    # pi pulse: full inversion at rabi * t = pi/2
    half = evolve(constant_fields(bx=rabi, tau=np.pi / (2 * rabi)),
                  StepPolicy(base_dt=1e-3), initial=zero, target=zero)
    assert half.fidelities[-1] == pytest.approx(0.0, abs=1e-10)


def test_lz_curve_against_dense_step_oracle():
    fields = lz_fields(bench_params())
    coarse = evolve(fields, StepPolicy())
    fine = evolve(fields, StepPolicy(base_dt=TAU / 81920))
    assert abs(coarse.fidelities[-1] - fine.fidelities[-1]) < 1e-6
    # endpoint oscillations from the discontinuous lambdadot are present
    tail = coarse.fidelities[coarse.times > TAU - 1.0]
    assert tail.max() - tail.min() > 0.01


def test_fidelity_contract():
    assert fidelity(PLUS_X, PLUS_X) == pytest.approx(1.0)
    assert fidelity(PLUS_X, MINUS_X) == pytest.approx(0.0, abs=1e-15)
    phase = np.exp(1j * 0.7) * PLUS_X
    assert fidelity(phase, PLUS_X) == pytest.approx(1.0)
    assert fidelity(PLUS_X, phase) == fidelity(phase, PLUS_X)
    with pytest.raises(ContractViolationError):
        fidelity(np.array([1.0, 1.0]), PLUS_X)


def test_initial_ground_state_overlap_oracle():
    # closed form: |<-x|gs>| = cos(arctan(delta/lambda0)/2); the reference
    # experiment quotes 0.9978 for these parameters, which matches neither
    # the amplitude nor its square -- the oracle value is pinned instead
    gs = ground_state(DELTA, LAM0)
    amp = abs(np.vdot(MINUS_X, gs))
    assert amp == pytest.approx(np.cos(np.arctan(DELTA / LAM0) / 2), abs=1e-12)
    assert amp == pytest.approx(0.9994461360815321, abs=1e-12)


def test_final_fidelity_window():
    times = np.linspace(0.0, 1.0, 1001)
    states = np.tile(PLUS_X, (1001, 1))
    flat = EvolutionResult(times=times, states=states, fidelities=np.ones(1001))
    assert final_fidelity(flat, window=0.04) == 1.0
    # linear ramp over the window averages to its midpoint value
    ramp = np.where(times < 0.96, 0.5, 0.5 + (times - 0.96) * 10.0)
    result = EvolutionResult(times=times, states=states, fidelities=ramp)
    assert final_fidelity(result, window=0.04) == pytest.approx(0.5 + 0.2, abs=1e-3)
    with pytest.raises(DomainError):
        final_fidelity(flat, window=2.0)


def test_cd_exactness_any_duration():
    for tau in (0.5, 2.0, 6.0):
        params = bench_params(schedule=SweepSchedule("linear", LAM0, tau))
        initial = ground_state(DELTA, LAM0)
        target = ground_state(DELTA, -LAM0)
        result = evolve(cd_fields(params), StepPolicy(), initial=initial, target=target)
        assert result.fidelities[-1] >= 0.9999


def test_norm_drift_small_for_all_protocols():
    params = bench_params()
    for build in (lz_fields, cd_fields, ff_fields, fe_fields):
        result = evolve(build(params), StepPolicy())
        assert result.meta["norm_drift"] < 1e-9


def test_accuracy_error_on_coarse_policy():
    fields = constant_fields(bx=TWO_PI * 50.0, tau=1.0)
    with pytest.raises(AccuracyError) as err:
        evolve(fields, StepPolicy(base_dt=0.5))
    assert "max_phase_per_step" in err.value.diagnostics


def test_strobe_compare_self_is_zero():
    params = bench_params()
    policy = StepPolicy(base_dt=(TWO_PI / params.omega) / 64, oversample_per_period=64)
    cd = evolve(cd_fields(ProtocolParams(delta=fe_effective_gap(params),
                                         schedule=params.schedule)), policy)
    assert strobe_compare(cd, cd, params.omega, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_strobe_compare_grid_errors():
    params = bench_params()
    policy = StepPolicy(base_dt=(TWO_PI / params.omega) / 64, oversample_per_period=64)
    fe = evolve(fe_fields(params), policy)
    cd = evolve(cd_fields(params), StepPolicy(base_dt=TAU / 1000))
    with pytest.raises(GridError):
        strobe_compare(fe, cd, params.omega, params.capital_omega)
    cd_shared = evolve(cd_fields(params), policy)
    with pytest.raises(GridError):
        # no recorded time satisfies cos(omega t) = 0 for this omega
        strobe_compare(fe, cd_shared, params.omega * np.sqrt(2), params.capital_omega)


def test_record_stride_thins_grid():
    fields = constant_fields(bz=1.0, tau=1.0)
    result = evolve(fields, StepPolicy(base_dt=0.01, record_stride=10))
    assert len(result.times) == 11
    assert result.times[-1] == pytest.approx(1.0)
