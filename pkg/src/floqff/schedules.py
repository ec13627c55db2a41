"""Control-parameter sweep schedules with exact analytic derivatives.

All protocol synthesis downstream needs lambda(t) together with its first
and second time derivatives, evaluated exactly (no finite differencing).
Two ramp shapes are supported:

    linear: lambda(t) = lambda0 * (1 - 2 t/tau)
    cubic:  lambda(t) = lambda0 * (4 (t/tau)^3 - 6 (t/tau)^2 + 1)

Both run from +lambda0 at t=0 to -lambda0 at t=tau and are antisymmetric
about the midpoint.  The cubic additionally has vanishing slope at both
endpoints.  Values are angular frequencies in rad/us; durations in us.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SCHEDULE_KINDS = ("linear", "cubic")

# relative slack on the [0, tau] domain check, absorbs grid round-off
_DOMAIN_SLACK = 1e-9


@dataclass(frozen=True)
class SweepSchedule:
    """A closed-form ramp lambda(t) on [0, tau].

    Attributes
    ----------
    kind : either "linear" or "cubic".
    lambda0 : sweep amplitude in rad/us; its sign encodes the direction.
    tau : sweep duration in us, strictly positive.
    """

    kind: str
    lambda0: float
    tau: float

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise DomainError(f"unknown schedule kind {self.kind!r}; expected one of {SCHEDULE_KINDS}")
        if not np.isfinite(self.lambda0):
            raise DomainError("lambda0 must be finite")
        if not (np.isfinite(self.tau) and self.tau > 0):
            raise DomainError(f"tau must be positive and finite, got {self.tau}")


def eval_schedule(schedule: SweepSchedule, t):
    """Evaluate (lambda, dlambda/dt, d2lambda/dt2) at time(s) t.

    Accepts a scalar or ndarray t in [0, tau]; returns a matching triple.
    Raises DomainError for t outside the sweep interval.
    """
    tau = schedule.tau
    t_arr = np.asarray(t, dtype=float)
    slack = _DOMAIN_SLACK * tau
    if np.any(t_arr < -slack) or np.any(t_arr > tau + slack):
        raise DomainError(
            f"schedule evaluated outside [0, {tau}]: t range "
            f"[{t_arr.min()}, {t_arr.max()}]"
        )
    s = np.clip(t_arr, 0.0, tau) / tau
    lam0 = schedule.lambda0
    if schedule.kind == "linear":
        lam = lam0 * (1.0 - 2.0 * s)
        d1 = np.full_like(s, -2.0 * lam0 / tau)
        d2 = np.zeros_like(s)
    else:  # cubic
        lam = lam0 * (4.0 * s**3 - 6.0 * s**2 + 1.0)
        d1 = lam0 * (12.0 * s**2 - 12.0 * s) / tau
        d2 = lam0 * (24.0 * s - 12.0) / tau**2
    if np.isscalar(t) or t_arr.ndim == 0:
        return float(lam), float(d1), float(d2)
    return lam, d1, d2
