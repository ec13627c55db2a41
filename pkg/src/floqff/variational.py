"""General N-level fast-forward construction.

Implements the exact adiabatic gauge potential of H(lambda) = H0 + lambda H1,
the first Magnus term of the generalized periodic drive

    H_drive(t) = Omega omega sin(omega t) H + g(t) H1,
    g(t) = sum_l g_l cos(l omega t),

whose period average in the frame rotating with exp(-i Omega H cos(omega t))
is a Bessel-weighted matrix-element sum, and a derivative-free variational
fit of (Omega, g_l) that matches that average to the gauge potential term.
Dimensions up to 64 are supported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import AccuracyError, ContractViolationError, DegeneracyError, DomainError
from .evolve import EvolutionResult, StepPolicy
from .numerics import BESSEL_MAX_ARG, HERM_MAX_DIM, bessel_j, herm_exp
from .schedules import SweepSchedule, eval_schedule

_GAP_THRESHOLD = 1e-8  # relative to the spectral range
_HERMITICITY_TOL = 1e-12


def _check_hermitian(name: str, m: np.ndarray):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"{name} must be square, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max()))
    dev = float(np.abs(m - m.conj().T).max())
    if dev > _HERMITICITY_TOL * scale:
        raise ContractViolationError(f"{name} is not Hermitian: max deviation {dev:.3e}")
    return m


@dataclass(frozen=True)
class ManyBodyProblem:
    """H(lambda) = H0 + lambda H1 with lambda driven by `schedule`."""

    h0: np.ndarray
    h1: np.ndarray
    schedule: SweepSchedule

    def __post_init__(self):
        h0 = _check_hermitian("H0", self.h0)
        h1 = _check_hermitian("H1", self.h1)
        if h0.shape != h1.shape:
            raise DomainError("H0 and H1 must have the same shape")
        d = h0.shape[0]
        if d < 2 or d > HERM_MAX_DIM:
            raise DomainError(f"dimension must be in [2, {HERM_MAX_DIM}], got {d}")
        object.__setattr__(self, "h0", h0)
        object.__setattr__(self, "h1", h1)

    @property
    def dim(self) -> int:
        return self.h0.shape[0]

    def hamiltonian(self, lam: float) -> np.ndarray:
        return self.h0 + lam * self.h1


@dataclass(frozen=True)
class DriveAnsatz:
    """Variational drive parameters: Omega and cosine-series coefficients g_l."""

    capital_omega: float
    g: np.ndarray

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.g, dtype=float))
        if g.ndim != 1 or g.size < 1 or not np.all(np.isfinite(g)):
            raise DomainError("g must be a finite 1-D coefficient array")
        object.__setattr__(self, "g", g)

    @property
    def l_max(self) -> int:
        return self.g.size - 1

    def g_of_t(self, omega: float, t):
        t = np.asarray(t, dtype=float)
        ls = np.arange(self.g.size)
        return (self.g[None, :] * np.cos(np.multiply.outer(t, ls) * omega)).sum(axis=-1)


@dataclass(frozen=True)
class SpectralData:
    """Eigen-decomposition of H at a frozen lambda (ascending eigenvalues)."""

    energies: np.ndarray
    vectors: np.ndarray

    @property
    def gaps(self) -> np.ndarray:
        return self.energies[:, None] - self.energies[None, :]

    def to_eigenbasis(self, m: np.ndarray) -> np.ndarray:
        return self.vectors.conj().T @ m @ self.vectors

    def from_eigenbasis(self, m: np.ndarray) -> np.ndarray:
        return self.vectors @ m @ self.vectors.conj().T


def spectral(problem: ManyBodyProblem, lam: float) -> SpectralData:
    w, v = np.linalg.eigh(problem.hamiltonian(lam))
    return SpectralData(energies=w, vectors=v)


def _check_gaps(spec: SpectralData, threshold: float = _GAP_THRESHOLD):
    w = spec.energies
    spread = float(w[-1] - w[0])
    if spread == 0.0:
        raise DegeneracyError("spectrum is fully degenerate")
    diffs = np.diff(w)
    worst = int(np.argmin(diffs))
    if diffs[worst] < threshold * spread:
        raise DegeneracyError(
            f"levels {worst} and {worst + 1} are degenerate to relative gap "
            f"{diffs[worst] / spread:.2e} (threshold {threshold:.0e})"
        )


def agp_exact(problem: ManyBodyProblem, lam: float) -> np.ndarray:
    """Exact adiabatic gauge potential at frozen lambda.

    A = sum_{n != m} i <n|H1|m> / (e_m - e_n) |n><m|, returned in the
    original basis; its eigenbasis representation has zero diagonal.
    Raises DegeneracyError when the spectrum is too close to degenerate.
    """
    spec = spectral(problem, lam)
    _check_gaps(spec)
    h1e = spec.to_eigenbasis(problem.h1)
    gaps = spec.gaps  # gaps[n, m] = e_n - e_m
    denom = np.where(np.abs(gaps) > 0, -gaps, 1.0)  # e_m - e_n
    a_eig = 1j * h1e / denom
    np.fill_diagonal(a_eig, 0.0)
    return spec.from_eigenbasis(a_eig)


def _bessel_matrix(l: int, x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    flat_x = x.ravel()
    flat_o = out.ravel()
    for i, xi in enumerate(flat_x):
        flat_o[i] = bessel_j(l, float(xi))
    return out


def _magnus_weight(spec: SpectralData, ansatz: DriveAnsatz) -> np.ndarray:
    args = ansatz.capital_omega * spec.gaps
    if float(np.abs(args).max()) > BESSEL_MAX_ARG:
        raise DomainError(
            f"Bessel argument |Omega (e_n - e_m)| = {np.abs(args).max():.2f} exceeds "
            f"the supported range {BESSEL_MAX_ARG}"
        )
    weight = np.zeros(args.shape, dtype=complex)
    for l, gl in enumerate(ansatz.g):
        if gl == 0.0:
            continue
        weight += (1j**l) * gl * _bessel_matrix(l, args)
    return weight


def _magnus_eig(spec: SpectralData, ansatz: DriveAnsatz, h1e: np.ndarray) -> np.ndarray:
    return _magnus_weight(spec, ansatz) * h1e


def magnus_h0(problem: ManyBodyProblem, ansatz: DriveAnsatz, lam: float) -> np.ndarray:
    """First Magnus term of the generalized drive at frozen lambda.

    In the eigenbasis of H(lambda) the entries are
    sum_l i^l g_l J_l(Omega (e_n - e_m)) <n|H1|m>.  Hermiticity follows
    from the parity pairing of i^l with J_l and is asserted on the result.
    """
    spec = spectral(problem, lam)
    h1e = spec.to_eigenbasis(problem.h1)
    m_eig = _magnus_eig(spec, ansatz, h1e)
    out = spec.from_eigenbasis(m_eig)
    scale = max(1.0, float(np.abs(out).max()))
    dev = float(np.abs(out - out.conj().T).max())
    if dev > 1e-10 * scale:
        raise AccuracyError(
            "first Magnus term lost Hermiticity",
            diagnostics={"deviation": dev},
        )
    return out


@dataclass(frozen=True)
class VariationalFit:
    """Best drive parameters found and the remaining objective value."""

    ansatz: DriveAnsatz
    residual: float
    converged: bool
    n_evaluations: int
    meta: dict = field(default_factory=dict)


def _offdiag_norm(m: np.ndarray) -> float:
    off = m - np.diag(np.diag(m))
    return float(np.linalg.norm(off))


def variational_fit(problem: ManyBodyProblem, lam: float, lam_dot: float,
                    l_max: int, budget: int = 2000, restarts: int = 5,
                    seed: int = 0) -> VariationalFit:
    """Fit (Omega, g_0..g_L) so the first Magnus term implements lambdadot * A.

    Minimizes || offdiag(Magnus) - lambdadot * A ||_F in the instantaneous
    eigenbasis with a Nelder-Mead simplex restarted from `restarts` seeded
    points; the total function-evaluation budget is split across restarts.
    Diagonal terms only dress phases, so they are excluded from the
    objective.
    """
    if l_max < 1:
        raise DomainError("l_max must be >= 1")
    spec = spectral(problem, lam)
    _check_gaps(spec)
    h1e = spec.to_eigenbasis(problem.h1)
    gaps = spec.gaps
    denom = np.where(np.abs(gaps) > 0, -gaps, 1.0)
    target = 1j * h1e / denom * lam_dot
    np.fill_diagonal(target, 0.0)
    max_gap = float(np.abs(gaps).max())
    omega_cap = BESSEL_MAX_ARG / max_gap

    evals = [0]

    def objective(params):
        evals[0] += 1
        cap, g = params[0], params[1:]
        if abs(cap) > omega_cap:
            return 1e6 * (1.0 + abs(cap) - omega_cap)
        ansatz = DriveAnsatz(capital_omega=float(cap), g=np.asarray(g))
        m = _magnus_eig(spec, ansatz, h1e)
        diff = m - target
        np.fill_diagonal(diff, 0.0)
        return float(np.linalg.norm(diff))

    # restarts seeded from the exact least-squares g at a ladder of Omega
    # values (the objective is linear in g at fixed Omega), with small
    # seeded perturbations of Omega for diversity
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, 0, 2))))
    scale = 1.0 / max(max_gap, 1e-12)
    ladder = np.geomspace(0.3, 4.0, max(1, restarts))
    starts = []
    for i, base in enumerate(ladder):
        cap0 = float(base * scale)
        if i > 0:
            cap0 *= float(rng.uniform(0.85, 1.15))
        g0 = fit_g_linear(problem, cap0, lam, lam_dot, l_max, frame_drag=False).g
        starts.append(np.concatenate(([cap0], g0)))
    per_restart = max(50, budget // max(1, len(starts)))

    best_x, best_f = starts[0], objective(starts[0])
    for x0 in starts:
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxfev": per_restart, "xatol": 1e-12, "fatol": 1e-14})
        if res.fun < best_f:
            best_f, best_x = float(res.fun), np.asarray(res.x)
        if best_f < 1e-13:
            break
    converged = evals[0] <= budget or best_f < 1e-10
    ansatz = DriveAnsatz(capital_omega=float(best_x[0]), g=best_x[1:].copy())
    return VariationalFit(ansatz=ansatz, residual=best_f, converged=converged,
                          n_evaluations=evals[0],
                          meta={"lam": lam, "lam_dot": lam_dot, "l_max": l_max})


def fit_g_linear(problem: ManyBodyProblem, capital_omega: float, lam: float,
                 lam_dot: float, l_max: int, frame_drag: bool = True) -> DriveAnsatz:
    """Optimal g at fixed Omega by linear least squares.

    The Magnus term is linear in g, so for a given Omega the off-diagonal
    matching problem is an ordinary least-squares solve; used to build
    slowly varying drives along a sweep without rerunning the simplex.

    With frame_drag (default), the target is lambdadot * A scaled
    elementwise by J0(Omega (e_n - e_m)): the rotating frame
    exp(+i Omega H(lambda(t)) cos(omega t)) itself moves with lambda, and
    its period-averaged velocity term contributes
    lambdadot * A * (1 - J0(Omega (e_n - e_m))) to the effective
    Hamiltonian regardless of omega.  Without the factor the integrated
    drive stalls at an omega-independent fidelity floor.
    """
    spec = spectral(problem, lam)
    _check_gaps(spec)
    h1e = spec.to_eigenbasis(problem.h1)
    gaps = spec.gaps
    denom = np.where(np.abs(gaps) > 0, -gaps, 1.0)
    target = 1j * h1e / denom * lam_dot
    if frame_drag:
        target = target * _bessel_matrix(0, capital_omega * gaps)
    np.fill_diagonal(target, 0.0)
    d = problem.dim
    off_mask = ~np.eye(d, dtype=bool)
    args = capital_omega * gaps
    cols = []
    for l in range(l_max + 1):
        basis = (1j**l) * _bessel_matrix(l, args) * h1e
        cols.append(basis[off_mask])
    a = np.stack(cols, axis=1)
    b = target[off_mask]
    a_ri = np.concatenate([a.real, a.imag], axis=0)
    b_ri = np.concatenate([b.real, b.imag], axis=0)
    g, *_ = np.linalg.lstsq(a_ri, b_ri, rcond=None)
    return DriveAnsatz(capital_omega=capital_omega, g=g)


def interpolated_drive(problem: ManyBodyProblem, capital_omega: float,
                       l_max: int, n_knots: int = 33):
    """Callable t -> DriveAnsatz with g refit on a knot grid along the sweep."""
    sched = problem.schedule
    knots = np.linspace(0.0, sched.tau, n_knots)
    g_table = np.empty((n_knots, l_max + 1))
    for i, t in enumerate(knots):
        lam, d1, _ = eval_schedule(sched, float(t))
        g_table[i] = fit_g_linear(problem, capital_omega, lam, d1, l_max).g

    def drive(t: float) -> DriveAnsatz:
        g = np.array([np.interp(t, knots, g_table[:, l]) for l in range(l_max + 1)])
        return DriveAnsatz(capital_omega=capital_omega, g=g)

    return drive


def _dense_ground_state(h: np.ndarray) -> np.ndarray:
    _, v = np.linalg.eigh(h)
    return v[:, 0]


def evolve_dense(problem: ManyBodyProblem, drive, omega: float | None = None,
                 policy: StepPolicy | None = None,
                 record_stride: int | None = None) -> EvolutionResult:
    """Propagate the d-level system and track ground-state fidelity.

    drive is one of:
      "bare"         -- H(lambda(t)) alone;
      "cd"           -- H(lambda(t)) + lambdadot(t) * A(lambda(t)), the exact
                        counter-diabatic generator;
      DriveAnsatz    -- fixed (Omega, g) periodic drive (needs omega);
      callable t -> DriveAnsatz for slowly varying coefficients.

    For periodic drives the recorded fidelity maps the state through
    V^dag(t) = exp(+i Omega H(lambda(t)) cos(omega t)) so it measures
    adiabaticity in the rotating frame; lambda is frozen per evaluation.
    The initial state is the instantaneous ground state at t = 0.
    """
    sched = problem.schedule
    periodic = not isinstance(drive, str)
    if periodic and omega is None:
        raise DomainError("periodic drives need the modulation frequency omega")
    policy = policy or StepPolicy()
    n_steps = policy.step_count(sched.tau, omega if periodic else None)
    dt = sched.tau / n_steps
    stride = record_stride if record_stride is not None else policy.record_stride

    drive_at = (lambda t: drive) if isinstance(drive, DriveAnsatz) else drive

    def generator(t: float) -> np.ndarray:
        lam, d1, _ = eval_schedule(sched, t)
        h = problem.hamiltonian(lam)
        if drive == "bare":
            return h
        if drive == "cd":
            return h + d1 * agp_exact(problem, lam)
        ansatz = drive_at(t)
        g_t = float(np.sum(ansatz.g * np.cos(np.arange(ansatz.g.size) * omega * t)))
        # the Bessel-weighted average uses J_l(Omega (e_n - e_m)), which is
        # the rotating frame of exp(+i Omega H cos(omega t)); the matching
        # lab-frame drive then carries -Omega omega sin(omega t) H
        return -ansatz.capital_omega * omega * np.sin(omega * t) * h + g_t * problem.h1

    lam0 = eval_schedule(sched, 0.0)[0]
    psi = _dense_ground_state(problem.hamiltonian(lam0)).astype(complex)

    record_idx = list(range(0, n_steps + 1, stride))
    if record_idx[-1] != n_steps:
        record_idx.append(n_steps)
    times, states, fids = [], [], []

    def record(step: int, psi_now: np.ndarray):
        t = step * dt
        lam = eval_schedule(sched, t)[0] if step < n_steps else eval_schedule(sched, sched.tau)[0]
        h = problem.hamiltonian(lam)
        psi_eff = psi_now
        if periodic:
            cap = drive_at(t).capital_omega
            v_dag = herm_exp(h, -cap * np.cos(omega * t))
            psi_eff = v_dag @ psi_now
        gs = _dense_ground_state(h)
        times.append(t)
        states.append(psi_eff.copy())
        fids.append(float(np.abs(np.vdot(gs, psi_eff)) ** 2))

    pos = 0
    if record_idx[pos] == 0:
        record(0, psi)
        pos += 1
    for j in range(n_steps):
        t_mid = (j + 0.5) * dt
        psi = herm_exp(generator(t_mid), dt) @ psi
        if pos < len(record_idx) and record_idx[pos] == j + 1:
            record(j + 1, psi)
            pos += 1
    norm_drift = abs(np.linalg.norm(psi) - 1.0)
    if norm_drift > 1e-9:
        raise AccuracyError("norm drift exceeded tolerance in dense evolution",
                            diagnostics={"norm_drift": norm_drift})
    return EvolutionResult(
        times=np.asarray(times), states=np.asarray(states), fidelities=np.asarray(fids),
        meta={"drive": drive if isinstance(drive, str) else "ansatz",
              "omega": omega, "n_steps": n_steps, "norm_drift": norm_drift},
    )


def save_problem(path, h0: np.ndarray, h1: np.ndarray):
    """Write H0 and H1 as whitespace-separated complex text with a dimension header."""
    h0 = np.asarray(h0, dtype=complex)
    d = h0.shape[0]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{d}\n")
        for m in (h0, np.asarray(h1, dtype=complex)):
            for row in m:
                fh.write(" ".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row) + "\n")


def load_problem(path, schedule: SweepSchedule) -> ManyBodyProblem:
    """Read a problem written by save_problem and attach a schedule."""
    with open(path, "r", encoding="utf-8") as fh:
        tokens = fh.read().split()
    if not tokens:
        raise DomainError(f"{path}: empty problem file")
    try:
        d = int(tokens[0])
    except ValueError as exc:
        raise DomainError(f"{path}: first token must be the dimension") from exc
    need = 1 + 2 * d * d
    if len(tokens) != need:
        raise DomainError(f"{path}: expected {need} tokens for dimension {d}, found {len(tokens)}")
    try:
        values = np.array([complex(tok) for tok in tokens[1:]])
    except ValueError as exc:
        raise DomainError(f"{path}: unparseable complex entry: {exc}") from exc
    h0 = values[: d * d].reshape(d, d)
    h1 = values[d * d:].reshape(d, d)
    return ManyBodyProblem(h0=h0, h1=h1, schedule=schedule)
