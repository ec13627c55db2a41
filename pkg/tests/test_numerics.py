import numpy as np
import pytest
from mpmath import mp

from floqff.errors import ContractViolationError, DomainError, NumericalError
from floqff.numerics import (PauliVector, bessel_j, bessel_j1_zeros, herm_exp,
                             pauli_exp, period_average)

mp.dps = 40


def series_j0(x, terms=200):
    """Independent power-series oracle for J0, summed in 40-digit arithmetic."""
    x = mp.mpf(x)
    total = mp.mpf(0)
    term = mp.mpf(1)
    for k in range(terms):
        total += term
        term *= -(x / 2) ** 2 / mp.mpf((k + 1) ** 2)
    return total


def test_bessel_trivial_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert bessel_j(7, 0.0) == 0.0


def test_bessel_j0_at_two_pi_pinned():
    oracle = float(series_j0(2 * mp.pi))
    value = bessel_j(0, 2 * np.pi)
    assert value == pytest.approx(oracle, abs=1e-14)
    assert value == pytest.approx(0.2202769085399346, abs=1e-13)


@pytest.mark.parametrize("l", [0, 1, 2, 3, 5, 8, 15, 33])
@pytest.mark.parametrize("x", [-49.5, -12.1, -3.0, 0.5, 3.0, 7.7, 11.9, 12.1, 20.0, 35.0, 49.5])
def test_bessel_accuracy_vs_mpmath(l, x):
    assert bessel_j(l, x) == pytest.approx(float(mp.besselj(l, x)), abs=1e-12)


def test_bessel_recurrence():
    rng = np.random.default_rng(0)
    for _ in range(40):
        l = int(rng.integers(1, 12))
        x = float(rng.uniform(0.3, 49.0))
        lhs = bessel_j(l - 1, x) + bessel_j(l + 1, x)
        rhs = (2 * l / x) * bessel_j(l, x)
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_bessel_domain_errors():
    with pytest.raises(DomainError):
        bessel_j(-1, 1.0)
    with pytest.raises(DomainError):
        bessel_j(0, 51.0)
    with pytest.raises(DomainError):
        bessel_j(1.5, 1.0)


def test_bessel_j1_zeros():
    zeros = bessel_j1_zeros()
    expected = [3.831705970207512, 7.015586669815613, 10.173468135062722]
    assert np.allclose(zeros[:3], expected, atol=1e-10)
    for z in zeros[:5]:
        assert abs(bessel_j(1, z)) < 1e-11


def test_pauli_exp_zero_generator_is_identity():
    u = pauli_exp(PauliVector(0.0, 0.0, 0.0), 5.0)
    assert np.array_equal(u, np.eye(2))


def test_pauli_exp_z_rotation_closed_form():
    delta = 2 * np.pi * 0.37
    u = pauli_exp(PauliVector(0.0, 0.0, delta), np.pi / (2 * delta))
    expected = np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)])
    assert np.allclose(u, expected, atol=1e-14)


def test_pauli_exp_unitarity_random():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = PauliVector(*rng.normal(0, 5, 3))
        u = pauli_exp(a, float(rng.uniform(0, 2)))
        assert np.abs(u @ u.conj().T - np.eye(2)).max() < 1e-14


def test_pauli_exp_composition():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = PauliVector(*rng.normal(0, 3, 3))
        dt = float(rng.uniform(0.01, 0.5))
        once = pauli_exp(a, dt)
        assert np.abs(once @ once - pauli_exp(a, 2 * dt)).max() < 1e-13


def test_pauli_exp_negative_dt_rejected():
    with pytest.raises(DomainError):
        pauli_exp(PauliVector(1.0, 0.0, 0.0), -0.1)


def test_period_average_full_period_cosine():
    omega = 2 * np.pi * 6.0
    assert period_average(lambda t: np.cos(omega * t), 2 * np.pi / omega) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("cap", [np.pi / 4, np.pi / 2, np.pi])
def test_period_average_jacobi_anger(cap):
    omega = 2 * np.pi * 6.0
    period = 2 * np.pi / omega
    avg0 = period_average(lambda t: np.cos(2 * cap * np.cos(omega * t)), period)
    avg1 = period_average(lambda t: np.cos(omega * t) * np.sin(2 * cap * np.cos(omega * t)), period)
    assert avg0 == pytest.approx(bessel_j(0, 2 * cap), abs=1e-10)
    assert avg1 == pytest.approx(bessel_j(1, 2 * cap), abs=1e-10)


def test_period_average_reports_nonconvergence():
    # integrable but nearly non-quadrable singularity exhausts the bisection
    with pytest.raises(NumericalError) as err:
        period_average(lambda t: abs(t - 0.3) ** -0.95, 1.0)
    assert err.value.residual is None or err.value.residual > 0


def test_herm_exp_zero_and_qubit_agreement():
    assert np.allclose(herm_exp(np.zeros((3, 3)), 1.7), np.eye(3), atol=1e-15)
    a = PauliVector(0.4, -0.9, 1.3)
    h = np.array([[a.a_z, a.a_x - 1j * a.a_y], [a.a_x + 1j * a.a_y, -a.a_z]])
    assert np.abs(herm_exp(h, 0.77) - pauli_exp(a, 0.77)).max() < 1e-11


def test_herm_exp_unitarity_d8():
    rng = np.random.default_rng(3)
    m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    h = (m + m.conj().T) / 2
    u = herm_exp(h, 0.31)
    assert np.abs(u @ u.conj().T - np.eye(8)).max() < 1e-11


def test_herm_exp_contract_violations():
    with pytest.raises(ContractViolationError):
        herm_exp(np.array([[0.0, 1.0], [0.0, 0.0]]), 0.1)
    with pytest.raises(DomainError):
        herm_exp(np.zeros((65, 65)), 0.1)
