"""Control-field synthesis for the four state-preparation protocols.

Builds the time-dependent (B_x, B_y, B_z) coefficient functions for:

    lz  -- bare avoided-crossing sweep, B_z = Delta, B_x = lambda(t)
    cd  -- counter-diabatic drive adding the velocity term on sigma_y
    ff  -- fast-forward drive using only sigma_z / sigma_x with the
           arctan-derivative expanded analytically
    fe  -- Floquet-engineered fast-forward drive with a rapidly
           oscillating component at angular frequency omega

plus the rotating-frame map connecting the fe lab frame to the frame in
which it acts as a counter-diabatic drive, parameter validation for the
stroboscopic conditions, and the lab-frame (carrier-modulated) fields
used to verify the rotating-wave approximation.

All coefficients are angular frequencies in rad/us.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SingularityError
from .numerics import PauliVector, bessel_j, bessel_j1_zeros, pauli_exp
from .schedules import SweepSchedule, eval_schedule

# minimum omega/delta ratio accepted by fe_fields; the high-frequency
# construction is meaningless below this
_MIN_OMEGA_RATIO = 2.0
DEFAULT_J1_GUARD = 1e-3


@dataclass(frozen=True)
class ProtocolParams:
    """Shared parameter block for all protocols.

    delta : static gap coefficient on sigma_z (rad/us), > 0.
    schedule : the lambda(t) ramp.
    omega : Floquet drive angular frequency (rad/us), fe only.
    capital_omega : dimensionless drive strength Omega, fe only.
    alpha : smooth part of the fe sigma_z field; defaults to delta so the
        lab-frame gap is unchanged.
    j1_guard : reject fe parameter sets with |J1(2 Omega)| below this.
    """

    delta: float
    schedule: SweepSchedule
    omega: float | None = None
    capital_omega: float | None = None
    alpha: float | None = None
    j1_guard: float = DEFAULT_J1_GUARD

    def __post_init__(self):
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise DomainError(f"delta must be positive, got {self.delta}")
        if self.omega is not None and not (np.isfinite(self.omega) and self.omega > 0):
            raise DomainError(f"omega must be positive, got {self.omega}")
        if self.alpha is not None and not (np.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(f"alpha must be positive, got {self.alpha}")

    @property
    def alpha_eff(self) -> float:
        return self.delta if self.alpha is None else self.alpha


@dataclass(frozen=True)
class ControlFields:
    """Time-dependent Pauli coefficients of one protocol on [0, tau].

    bx, by, bz accept scalar or ndarray times.  omega is the modulation
    frequency for protocols with a fast oscillating component (None
    otherwise); meta carries the parameters the fields were built from.
    """

    bx: object
    by: object
    bz: object
    tau: float
    label: str
    omega: float | None = None
    meta: dict = field(default_factory=dict)

    def pauli_at(self, t: float) -> PauliVector:
        return PauliVector(float(self.bx(t)), float(self.by(t)), float(self.bz(t)))


def _zeros_like(t):
    return np.zeros_like(np.asarray(t, dtype=float))


def lz_fields(params: ProtocolParams) -> ControlFields:
    """Bare sweep: B_z = delta, B_x = lambda(t), B_y = 0."""
    sched = params.schedule
    delta = params.delta
    return ControlFields(
        bx=lambda t: eval_schedule(sched, t)[0],
        by=_zeros_like,
        bz=lambda t: np.full_like(np.asarray(t, dtype=float), delta),
        tau=sched.tau,
        label="lz",
        meta={"delta": delta, "lambda0": sched.lambda0},
    )


def cd_fields(params: ProtocolParams) -> ControlFields:
    """Counter-diabatic drive: adds (1/2) delta lambdadot / (delta^2 + lambda^2) on sigma_y."""
    sched = params.schedule
    delta = params.delta

    def by(t):
        lam, d1, _ = eval_schedule(sched, t)
        return 0.5 * delta * d1 / (delta**2 + lam**2)

    return ControlFields(
        bx=lambda t: eval_schedule(sched, t)[0],
        by=by,
        bz=lambda t: np.full_like(np.asarray(t, dtype=float), delta),
        tau=sched.tau,
        label="cd",
        meta={"delta": delta, "lambda0": sched.lambda0},
    )


def ff_fields(params: ProtocolParams) -> ControlFields:
    """Fast-forward drive on sigma_z / sigma_x only.

    With u = lambdadot / (2 (lambda^2 + delta^2)):

        B_z = delta * sqrt(1 + u^2)
        B_x = lambda + (1/2) * udot / (1 + u^2)

    where udot is expanded analytically in (lambda, lambdadot, lambdaddot),
    so endpoint discontinuities of the linear ramp enter exactly.
    """
    sched = params.schedule
    delta = params.delta

    def bz(t):
        lam, d1, _ = eval_schedule(sched, t)
        u = d1 / (2.0 * (lam**2 + delta**2))
        return delta * np.sqrt(1.0 + u * u)

    def bx(t):
        lam, d1, d2 = eval_schedule(sched, t)
        g = lam**2 + delta**2
        u = d1 / (2.0 * g)
        udot = d2 / (2.0 * g) - lam * d1 * d1 / (g * g)
        return lam + 0.5 * udot / (1.0 + u * u)

    return ControlFields(
        bx=bx,
        by=_zeros_like,
        bz=bz,
        tau=sched.tau,
        label="ff",
        meta={"delta": delta, "lambda0": sched.lambda0},
    )


def _require_fe_params(params: ProtocolParams):
    if params.omega is None or params.capital_omega is None:
        raise DomainError("fe protocol requires both omega and capital_omega")
    if params.omega < _MIN_OMEGA_RATIO * params.delta:
        raise DomainError(
            f"fe requires omega >> delta; got omega/delta = {params.omega / params.delta:.3g}"
            f" < {_MIN_OMEGA_RATIO}"
        )


def nearest_j1_zero(x: float) -> float:
    """Zero of J_1 closest to x (x = 0 included: J_1 vanishes there too)."""
    zeros = (0.0,) + bessel_j1_zeros()
    return min(zeros, key=lambda z: abs(z - abs(x)))


def fe_effective_gap(params: ProtocolParams) -> float:
    """Gap of the effective qubit in the fe rotating frame: alpha * J0(2 Omega)."""
    if params.capital_omega is None:
        raise DomainError("capital_omega is not set")
    return params.alpha_eff * bessel_j(0, 2.0 * params.capital_omega)


def fe_counter_amplitude(params: ProtocolParams, lam, lam_dot):
    """Slow envelope beta(t) of the fe oscillating sigma_z component.

    Fixed by the constraint beta J1(2 Omega) = (1/2) alpha J0(2 Omega)
    lambdadot / ((alpha J0(2 Omega))^2 + lambda^2), so the period-averaged
    rotating-frame Hamiltonian is exactly counter-diabatic.
    """
    j1 = bessel_j(1, 2.0 * params.capital_omega)
    gap = fe_effective_gap(params)
    return 0.5 * gap * lam_dot / ((gap**2 + lam**2) * j1)


def fe_fields(params: ProtocolParams) -> ControlFields:
    """Floquet-engineered drive: B_z = alpha - beta(t) cos(omega t),
    B_x = lambda(t) + omega Omega sin(omega t)."""
    _require_fe_params(params)
    cap = params.capital_omega
    j1 = bessel_j(1, 2.0 * cap)
    if abs(j1) < params.j1_guard:
        raise SingularityError(
            f"|J1(2 Omega)| = {abs(j1):.2e} below guard {params.j1_guard:.1e}: "
            f"2 Omega = {2 * cap:.6f} is within the guard band around the "
            f"J1 zero at {nearest_j1_zero(2 * cap):.6f}"
        )
    sched = params.schedule
    omega = params.omega
    alpha = params.alpha_eff

    def bz(t):
        lam, d1, _ = eval_schedule(sched, t)
        beta = fe_counter_amplitude(params, lam, d1)
        return alpha - beta * np.cos(omega * np.asarray(t, dtype=float))

    def bx(t):
        lam, _, _ = eval_schedule(sched, t)
        return lam + omega * cap * np.sin(omega * np.asarray(t, dtype=float))

    return ControlFields(
        bx=bx,
        by=_zeros_like,
        bz=bz,
        tau=sched.tau,
        label="fe",
        omega=omega,
        meta={
            "delta": params.delta,
            "lambda0": sched.lambda0,
            "capital_omega": cap,
            "alpha": alpha,
            "effective_gap": fe_effective_gap(params),
        },
    )


def rotating_frame_map(state: np.ndarray, capital_omega: float, omega: float, t: float) -> np.ndarray:
    """Map a lab-frame state into the fe rotating frame.

    Applies V^dag = exp(+i sigma_x theta(t)) with theta(t) = -Omega cos(omega t).
    Norm preserving; the identity whenever cos(omega t) = 0.
    """
    theta = -capital_omega * np.cos(omega * t)
    # exp(+i sigma_x theta) = exp(-i sigma_x (-theta))
    u = pauli_exp(PauliVector(-theta, 0.0, 0.0), 1.0)
    return u @ np.asarray(state, dtype=complex)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the stroboscopic / drive-strength parameter checks."""

    omega_tau_over_pi: float
    strobe_integer: bool
    capital_omega_over_pi: float
    omega_strict: bool
    relaxed_mode: bool
    omega_over_delta: float
    j1_value: float
    j1_zero_distance: float
    warnings: tuple


def validate_floquet_params(params: ProtocolParams, tol: float = 1e-9) -> ValidationReport:
    """Report whether fe parameters satisfy the stroboscopic conditions.

    Checks (i) omega * tau = n pi within tol, (ii) Omega = m pi, flagging
    the relaxed mode allowed when the boundary states lie along x,
    (iii) the ratio omega/delta, (iv) distance of 2 Omega from the nearest
    zero of J1.  All findings are warnings except the J1 guard, which is
    enforced by fe_fields itself.
    """
    _require_fe_params(params)
    warnings = []
    ratio = params.omega * params.schedule.tau / np.pi
    strobe = abs(ratio - round(ratio)) <= tol * max(1.0, abs(ratio))
    if not strobe:
        warnings.append(
            f"omega*tau/pi = {ratio:.9f} is not an integer: lab and rotating "
            "frames do not coincide at t = tau"
        )
    cap_ratio = params.capital_omega / np.pi
    strict = abs(cap_ratio - round(cap_ratio)) <= tol * max(1.0, abs(cap_ratio)) and round(cap_ratio) != 0
    relaxed = not strict
    if relaxed:
        warnings.append(
            f"Omega = {params.capital_omega:.6f} is not an integer multiple of pi: "
            "relying on boundary states lying along x (relaxed mode)"
        )
    ratio_od = params.omega / params.delta
    if ratio_od < 10.0:
        warnings.append(f"omega/delta = {ratio_od:.2f} < 10: first Magnus term may be inaccurate")
    j1 = bessel_j(1, 2.0 * params.capital_omega)
    dist = abs(2.0 * params.capital_omega - nearest_j1_zero(2.0 * params.capital_omega))
    if abs(j1) < 10 * params.j1_guard:
        warnings.append(
            f"|J1(2 Omega)| = {abs(j1):.2e} approaches the singularity guard"
        )
    return ValidationReport(
        omega_tau_over_pi=float(ratio),
        strobe_integer=bool(strobe),
        capital_omega_over_pi=float(cap_ratio),
        omega_strict=bool(strict),
        relaxed_mode=bool(relaxed),
        omega_over_delta=float(ratio_od),
        j1_value=float(j1),
        j1_zero_distance=float(dist),
        warnings=tuple(warnings),
    )


def lab_frame_fields(fields: ControlFields, omega0: float, n_probe: int = 2048) -> ControlFields:
    """Carrier-modulated lab-frame version of a protocol's rotating-frame fields.

        bz_lab = omega0/2 + B_z(t)
        bx_lab = 2 (B_x(t) cos(omega0 t) - B_y(t) sin(omega0 t))

    The B_y quadrature enters with a minus sign so that transforming with
    exp(+i omega0 t sigma_z / 2) and dropping the 2 omega0 terms recovers
    B_z sigma_z + B_x sigma_x + B_y sigma_y exactly.  Requires omega0 at
    least 10x every frequency scale of the protocol.
    """
    t_probe = np.linspace(0.0, fields.tau, n_probe)
    scale = max(
        float(np.max(np.abs(fields.bx(t_probe)))),
        float(np.max(np.abs(fields.by(t_probe)))),
        float(np.max(np.abs(fields.bz(t_probe)))),
        fields.omega or 0.0,
    )
    if omega0 < 10.0 * scale:
        raise DomainError(
            f"carrier omega0 = {omega0:.3g} rad/us is below 10x the protocol "
            f"frequency scale {scale:.3g} rad/us"
        )

    def bx(t):
        t = np.asarray(t, dtype=float)
        return 2.0 * (fields.bx(t) * np.cos(omega0 * t) - fields.by(t) * np.sin(omega0 * t))

    def bz(t):
        return omega0 / 2.0 + fields.bz(t)

    return ControlFields(
        bx=bx,
        by=_zeros_like,
        bz=bz,
        tau=fields.tau,
        label=f"{fields.label}-lab",
        omega=omega0,
        meta=dict(fields.meta, carrier=omega0),
    )
