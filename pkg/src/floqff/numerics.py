"""Special functions and exact small-unitary stepping primitives.

Self-contained Bessel functions of the first kind (integer order), exact
2x2 propagator steps from the Pauli closed form, adaptive-Simpson period
averages, and an eigendecomposition-based matrix exponential for the
N-level machinery.  Everything here is pure and re-entrant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractViolationError, DomainError, NumericalError

BESSEL_MAX_ARG = 50.0
_SERIES_CUTOFF = 12.0
HERM_MAX_DIM = 64


@dataclass(frozen=True)
class PauliVector:
    """Real coefficients (a_x, a_y, a_z) of the Pauli operators, rad/us."""

    a_x: float
    a_y: float
    a_z: float

    def __post_init__(self):
        if not all(np.isfinite(c) for c in (self.a_x, self.a_y, self.a_z)):
            raise DomainError("PauliVector components must be finite")

    @property
    def magnitude(self) -> float:
        return float(np.sqrt(self.a_x**2 + self.a_y**2 + self.a_z**2))


def _bessel_series(l: int, x: float) -> float:
    # ascending power series, converges fast for |x| <= 12
    half = 0.5 * x
    term = 1.0
    for k in range(1, l + 1):
        term *= half / k
        if term == 0.0:
            return 0.0
    total = term
    x2 = -(half * half)
    for k in range(1, 200):
        term *= x2 / (k * (l + k))
        total += term
        if abs(term) <= 1e-17 * abs(total) + 1e-300:
            return total
    raise NumericalError(f"Bessel series failed to converge for l={l}, x={x}", residual=abs(term))


def bessel_j(l: int, x: float) -> float:
    """Bessel function of the first kind J_l(x), |x| <= 50, integer l >= 0.

    Ascending series below |x| = 12, Miller downward recurrence above.
    Absolute error <= 1e-12 on the supported range.
    """
    if not isinstance(l, (int, np.integer)) or l < 0:
        raise DomainError(f"Bessel order must be a non-negative integer, got {l!r}")
    x = float(x)
    if not np.isfinite(x) or abs(x) > BESSEL_MAX_ARG:
        raise DomainError(f"Bessel argument |x| <= {BESSEL_MAX_ARG} required, got {x}")
    sign = -1.0 if (x < 0 and l % 2 == 1) else 1.0
    ax = abs(x)
    if ax <= _SERIES_CUTOFF:
        return sign * _bessel_series(int(l), ax)
    # start order high enough that the downward recurrence has damped the
    # arbitrary seed below 1e-13 relative by the time it reaches order l
    m = int(max(l, ax)) + 46 + int(2.0 * np.sqrt(ax))
    m += m % 2
    jp, j = 0.0, 1e-30
    wanted = 0.0
    total = 0.0  # accumulates J0 + 2*sum_{k>=1} J_2k
    for k in range(m, 0, -1):
        jm = (2.0 * k / ax) * j - jp
        jp, j = j, jm
        if abs(j) > 1e250:
            j *= 1e-250
            jp *= 1e-250
            wanted *= 1e-250
            total *= 1e-250
        if k - 1 == l:
            wanted = j
        if (k - 1) % 2 == 0 and k - 1 >= 2:
            total += 2.0 * j
    total += j  # adds J0
    return sign * wanted / total


@lru_cache(maxsize=8)
def bessel_j1_zeros(x_max: float = 60.0) -> tuple:
    """Positive zeros of J_1 below x_max, located by bisection on bessel_j."""
    zeros = []
    xs = np.arange(0.5, min(x_max, BESSEL_MAX_ARG), 0.05)
    vals = [bessel_j(1, float(x)) for x in xs]
    for a, b, fa, fb in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            zeros.append(float(a))
            continue
        if fa * fb < 0:
            lo, hi = float(a), float(b)
            flo = fa
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                fm = bessel_j(1, mid)
                if flo * fm <= 0:
                    hi = mid
                else:
                    lo, flo = mid, fm
                if hi - lo < 1e-13:
                    break
            zeros.append(0.5 * (lo + hi))
    return tuple(zeros)


def pauli_exp(a: PauliVector, dt: float) -> np.ndarray:
    """Exact 2x2 unitary exp(-i (a . sigma) dt).

    Uses cos(|a| dt) I - i sin(|a| dt) (a_hat . sigma); the |a| -> 0 limit
    returns the identity with no division by zero.
    """
    if dt < 0:
        raise DomainError(f"dt must be non-negative, got {dt}")
    mag = a.magnitude
    phi = mag * dt
    c = np.cos(phi)
    # sin(phi)/|a|; equals dt exactly in the |a| -> 0 limit
    s = np.sin(phi) / mag if mag > 0 else dt
    sx, sy, sz = s * a.a_x, s * a.a_y, s * a.a_z
    return np.array(
        [[c - 1j * sz, -sy - 1j * sx],
         [sy - 1j * sx, c + 1j * sz]],
        dtype=complex,
    )


def _simpson(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive_simpson(f, a, fa, b, fb, whole, m, fm, tol, depth):
    lm, flm, left = _simpson(f, a, fa, m, fm)
    rm, frm, right = _simpson(f, m, fm, b, fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth <= 0:
        raise NumericalError(
            "adaptive Simpson quadrature did not converge", residual=abs(delta) / 15.0
        )
    half = 0.5 * tol
    return (_adaptive_simpson(f, a, fa, m, fm, left, lm, flm, half, depth - 1)
            + _adaptive_simpson(f, m, fm, b, fb, right, rm, frm, half, depth - 1))


def period_average(f, period: float, tol: float = 1e-10) -> float:
    """(1/T) * integral of f over [0, T] by adaptive Simpson bisection.

    Absolute error of the returned average <= tol.  Raises NumericalError
    with the residual estimate if the recursion depth is exhausted.
    """
    if not (np.isfinite(period) and period > 0):
        raise DomainError(f"period must be positive, got {period}")
    # seed with a few panels so periodic integrands are not aliased by
    # the first Simpson estimate
    n0 = 8
    edges = np.linspace(0.0, period, n0 + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        fa, fb = f(a), f(b)
        m, fm, whole = _simpson(f, a, fa, b, fb)
        total += _adaptive_simpson(f, a, fa, b, fb, whole, m, fm, tol * period / n0, 48)
    return total / period


def herm_exp(h: np.ndarray, dt: float) -> np.ndarray:
    """Unitary exp(-i H dt) for a Hermitian matrix H via eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError(f"herm_exp needs a square matrix, got shape {h.shape}")
    d = h.shape[0]
    if d > HERM_MAX_DIM:
        raise DomainError(f"dimension {d} exceeds supported maximum {HERM_MAX_DIM}")
    scale = max(1.0, float(np.abs(h).max()))
    dev = float(np.abs(h - h.conj().T).max())
    if dev > 1e-12 * scale:
        raise ContractViolationError(
            f"herm_exp requires a Hermitian matrix; max |H - H^dag| = {dev:.3e}"
        )
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * dt)) @ v.conj().T
