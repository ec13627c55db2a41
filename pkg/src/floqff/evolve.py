"""Two-level Schrodinger integration and fidelity bookkeeping.

The stepper is a midpoint-sampled piecewise-constant exponential: each
step applies the exact 2x2 unitary for the Hamiltonian frozen at the
step midpoint.  Steps are exactly unitary, so norm drift stays at the
float rounding floor over full protocols.  A batched variant propagates
many noise realizations simultaneously for the ensemble machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyError, ContractViolationError, DomainError, GridError
from .protocols import ControlFields, rotating_frame_map

# sqrt(1/2)-amplitude sigma_x eigenstates; the protocol endpoints
MINUS_X = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)
PLUS_X = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)

DEFAULT_BASE_STEPS = 8192
DEFAULT_OVERSAMPLE = 512
NORM_DRIFT_LIMIT = 1e-9
# midpoint sampling stops resolving the generator above ~1.5 rad per step
_MAX_PHASE_PER_STEP = 1.5
FIDELITY_WINDOW_US = 0.04


def ground_state(delta: float, lam: float) -> np.ndarray:
    """Ground state of delta*sigma_z + lam*sigma_x (unit norm, real phase)."""
    h = np.array([[delta, lam], [lam, -delta]], dtype=float)
    _, vecs = np.linalg.eigh(h)
    g = vecs[:, 0].astype(complex)
    # fix the overall sign so the larger component is real positive
    k = int(np.argmax(np.abs(g)))
    g *= np.exp(-1j * np.angle(g[k]))
    return g


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|^2; symmetric and invariant under global phases."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    for name, v in (("a", a), ("b", b)):
        err = abs(np.linalg.norm(v) - 1.0)
        if err > 1e-6:
            raise ContractViolationError(f"state {name} is not normalized: |norm-1| = {err:.2e}")
    return float(np.abs(np.vdot(a, b)) ** 2)


@dataclass(frozen=True)
class StepPolicy:
    """Time-step policy for the propagator.

    base_dt : step for unmodulated protocols (None -> tau / 8192).
    oversample_per_period : steps per Floquet period when the fields carry
        a modulation frequency; the effective dt is the tighter of the two.
    record_stride : keep every k-th step in the recorded result.
    """

    base_dt: float | None = None
    oversample_per_period: int = DEFAULT_OVERSAMPLE
    record_stride: int = 1

    def __post_init__(self):
        if self.base_dt is not None and self.base_dt <= 0:
            raise DomainError(f"base_dt must be positive, got {self.base_dt}")
        if self.oversample_per_period < 1:
            raise DomainError("oversample_per_period must be >= 1")
        if self.record_stride < 1:
            raise DomainError("record_stride must be >= 1")

    def step_count(self, tau: float, omega: float | None) -> int:
        dt = self.base_dt if self.base_dt is not None else tau / DEFAULT_BASE_STEPS
        if omega is not None:
            dt = min(dt, (2.0 * np.pi / omega) / self.oversample_per_period)
        return max(1, int(round(tau / dt)))


@dataclass(frozen=True)
class EvolutionResult:
    """Recorded trajectory of one evolution.

    fidelities[i] = |<states[i] | target>|^2 for the target stored in meta.
    """

    times: np.ndarray
    states: np.ndarray
    fidelities: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (len(self.times) == len(self.states) == len(self.fidelities)):
            raise ContractViolationError("times, states and fidelities must have equal length")

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _midpoint_coefficients(fields: ControlFields, n_steps: int, noise=None, detuning=None):
    dt = fields.tau / n_steps
    t_mid = (np.arange(n_steps) + 0.5) * dt
    ax = np.asarray(fields.bx(t_mid), dtype=float)
    ay = np.asarray(fields.by(t_mid), dtype=float)
    az = np.asarray(fields.bz(t_mid), dtype=float)
    if noise is not None:
        az = az + noise.gamma(t_mid)
    if detuning is not None:
        az = az + float(detuning)
    return dt, t_mid, ax, ay, az


def _check_resolution(dt: float, ax, ay, az):
    phase = dt * float(np.max(np.sqrt(ax**2 + ay**2 + az**2)))
    if phase > _MAX_PHASE_PER_STEP:
        raise AccuracyError(
            "step policy too coarse for the generator",
            diagnostics={"max_phase_per_step": phase, "dt": dt},
        )


def _step_tables(ax, ay, az, dt):
    norm = np.sqrt(ax * ax + ay * ay + az * az)
    phi = norm * dt
    c = np.cos(phi)
    safe = np.where(norm > 0.0, norm, 1.0)
    s = np.where(norm > 0.0, np.sin(phi) / safe, dt)
    return c, s * ax, s * ay, s * az


def _propagate_states(ax, ay, az, dt, psi0, record_idx):
    """Sequential 2x2 stepping recording the state at selected step indices."""
    c, sx, sy, sz = _step_tables(ax, ay, az, dt)
    recorded = np.empty((len(record_idx), 2), dtype=complex)
    pos = 0
    if record_idx[pos] == 0:
        recorded[pos] = psi0
        pos += 1
    p0, p1 = complex(psi0[0]), complex(psi0[1])
    for j in range(len(ax)):
        u00 = c[j] - 1j * sz[j]
        u01 = -sy[j] - 1j * sx[j]
        u10 = sy[j] - 1j * sx[j]
        u11 = c[j] + 1j * sz[j]
        p0, p1 = u00 * p0 + u01 * p1, u10 * p0 + u11 * p1
        if pos < len(record_idx) and record_idx[pos] == j + 1:
            recorded[pos, 0] = p0
            recorded[pos, 1] = p1
            pos += 1
    return recorded


def propagate_batch(ax, ay, az, dt, psi0, target):
    """Propagate a batch of realizations sharing (ax, ay) with per-column az.

    ax, ay: (n,) arrays; az: (n, m).  Returns the (n+1, m) matrix of
    fidelities against target on the full step grid and the (2, m) final
    states.
    """
    n, m = az.shape
    psi = np.tile(np.asarray(psi0, dtype=complex)[:, None], (1, m))
    t0c, t1c = np.conj(target[0]), np.conj(target[1])
    fids = np.empty((n + 1, m))
    fids[0] = np.abs(t0c * psi[0] + t1c * psi[1]) ** 2
    for j in range(n):
        azj = az[j]
        norm = np.sqrt(ax[j] * ax[j] + ay[j] * ay[j] + azj * azj)
        phi = norm * dt
        c = np.cos(phi)
        safe = np.where(norm > 0.0, norm, 1.0)
        s = np.where(norm > 0.0, np.sin(phi) / safe, dt)
        sx, sy, sz = s * ax[j], s * ay[j], s * azj
        p0, p1 = psi[0], psi[1]
        psi = np.vstack(((c - 1j * sz) * p0 + (-sy - 1j * sx) * p1,
                         (sy - 1j * sx) * p0 + (c + 1j * sz) * p1))
        fids[j + 1] = np.abs(t0c * psi[0] + t1c * psi[1]) ** 2
    return fids, psi


def evolve(fields: ControlFields, policy: StepPolicy | None = None,
           initial: np.ndarray = MINUS_X, noise=None, detuning: float | None = None,
           target: np.ndarray = PLUS_X) -> EvolutionResult:
    """Integrate one protocol and record states and fidelities.

    The Hamiltonian per step is (bx sigma_x + by sigma_y +
    (bz + gamma(t_mid) + detuning) sigma_z) frozen at the step midpoint.
    The recording grid keeps every record_stride-th step plus the final
    time.  Raises AccuracyError if the policy cannot resolve the
    generator or norm drift exceeds 1e-9.
    """
    policy = policy or StepPolicy()
    initial = np.asarray(initial, dtype=complex)
    if abs(np.linalg.norm(initial) - 1.0) > 1e-9:
        raise ContractViolationError("initial state must be normalized")
    n_steps = policy.step_count(fields.tau, fields.omega)
    dt, _, ax, ay, az = _midpoint_coefficients(fields, n_steps, noise, detuning)
    _check_resolution(dt, ax, ay, az)
    record_idx = list(range(0, n_steps + 1, policy.record_stride))
    if record_idx[-1] != n_steps:
        record_idx.append(n_steps)
    states = _propagate_states(ax, ay, az, dt, initial, record_idx)
    norm_drift = float(np.max(np.abs(np.linalg.norm(states, axis=1) - 1.0)))
    if norm_drift > NORM_DRIFT_LIMIT:
        raise AccuracyError(
            "norm drift exceeded tolerance",
            diagnostics={"norm_drift": norm_drift, "n_steps": n_steps, "dt": dt},
        )
    times = np.asarray(record_idx, dtype=float) * dt
    target = np.asarray(target, dtype=complex)
    fids = np.abs(states @ np.conj(target)) ** 2
    meta = {
        "label": fields.label,
        "dt": dt,
        "n_steps": n_steps,
        "omega": fields.omega,
        "detuning": detuning,
        "noise_index": getattr(noise, "index", None),
        "norm_drift": norm_drift,
        "target": target,
    }
    return EvolutionResult(times=times, states=states, fidelities=fids, meta=meta)


def final_fidelity(result: EvolutionResult, window: float = FIDELITY_WINDOW_US) -> float:
    """Mean fidelity over recorded times in [tau - window, tau]."""
    tau = float(result.times[-1])
    if window > tau:
        raise DomainError(f"window {window} exceeds protocol duration {tau}")
    mask = result.times >= tau - window - 1e-12 * tau
    if not np.any(mask):
        raise GridError("no recorded samples inside the final-fidelity window")
    return float(np.mean(result.fidelities[mask]))


def strobe_times(result: EvolutionResult, omega: float, tol: float = 1e-9):
    """Indices of recorded times where cos(omega t) = 0 (frame-coincidence points)."""
    phase = np.cos(omega * result.times)
    idx = np.flatnonzero(np.abs(phase) < tol)
    return idx


def strobe_compare(fe_lab: EvolutionResult, cd: EvolutionResult,
                   omega: float, capital_omega: float) -> float:
    """Max stroboscopic infidelity between an fe run and a cd reference.

    Both results must share a recording grid containing times with
    cos(omega t) = 0, where the fe lab and rotating frames coincide.  The
    fe state is mapped through the rotating-frame unitary before the
    comparison.  The cd reference should be built with the effective
    rotating-frame gap delta * J0(2 Omega) of the fe drive.
    """
    if len(fe_lab.times) != len(cd.times) or not np.allclose(fe_lab.times, cd.times, rtol=0, atol=1e-12):
        raise GridError("fe and cd results are not on a shared time grid")
    idx = strobe_times(fe_lab, omega)
    if len(idx) == 0:
        raise GridError("no stroboscopic points (cos(omega t) = 0) on the recording grid")
    worst = 0.0
    for k in idx:
        mapped = rotating_frame_map(fe_lab.states[k], capital_omega, omega, float(fe_lab.times[k]))
        worst = max(worst, 1.0 - fidelity(mapped, cd.states[k]))
    return worst
