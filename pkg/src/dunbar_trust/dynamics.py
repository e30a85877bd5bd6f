"""Mean-field ignorant / susceptible / transmitter dynamics.

Everything is expressed in population fractions ``i + s + r = 1``::

    di/dt = 0
    ds/dt = -beta * s * r
    dr/dt = +beta * s * r

The unnormalised count equations are the same system scaled by ``N``;
:func:`informed_count` maps a fraction back to people.  With constant ``i``
the transmitter fraction follows a logistic curve saturating at ``1 - i``,
implemented in :func:`closed_form_r`.  :func:`integrate` solves the same
system with fixed-step RK4 so the two can be checked against each other.

Time is unitless and ``beta`` is a rate per unit time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .trust import TrustDistribution, uniform

__all__ = [
    "InfeasibleStateError",
    "UnreachableLevelError",
    "ModelParams",
    "PopulationFractions",
    "Trajectory",
    "closed_form_r",
    "closed_form_r_no_ignorant",
    "integrate",
    "time_to_level",
    "informed_count",
]

DEFAULT_DT = 0.01
DEFAULT_T_END = 100.0

# Absorbs rounding in 1 - i when r0 sits exactly on the saturation level.
_FEAS_TOL = 1e-12


class InfeasibleStateError(ValueError):
    """Initial transmitters exceed the participating population."""


class UnreachableLevelError(ValueError):
    """Requested transmitter level is never reached."""


@dataclass(frozen=True)
class ModelParams:
    """One scenario: population, transmission rate, cutoff and trust law.

    ``r0`` defaults to ``1 / n`` (a single initial transmitter).
    """

    n: int
    beta: float
    tc: float
    dist: TrustDistribution = field(default_factory=uniform)
    r0: float | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n <= 1:
            raise ValueError(f"n must be an integer > 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not (0.0 <= self.beta <= 1.0):
            raise ValueError(f"beta={self.beta} outside [0, 1]")
        if not (0.0 <= self.tc <= 1.0):
            raise ValueError(f"tc={self.tc} outside [0, 1]")
        if self.r0 is None:
            object.__setattr__(self, "r0", 1.0 / self.n)
        if not (0.0 < self.r0 < 1.0):
            raise ValueError(f"r0={self.r0} outside (0, 1)")
        if self.r0 > self.susceptible_fraction + _FEAS_TOL:
            raise InfeasibleStateError(
                f"r0={self.r0:g} exceeds participating fraction "
                f"{self.susceptible_fraction:g} at tc={self.tc:g}"
            )

    @property
    def susceptible_fraction(self) -> float:
        return self.dist.survival_fraction(self.tc)

    @property
    def ignorant_fraction(self) -> float:
        return 1.0 - self.susceptible_fraction

    def initial_state(self) -> "PopulationFractions":
        i = self.ignorant_fraction
        return PopulationFractions(i, max(0.0, 1.0 - i - self.r0), self.r0)


class PopulationFractions(NamedTuple):
    i: float
    s: float
    r: float


@dataclass(frozen=True)
class Trajectory:
    n: int
    times: np.ndarray
    i: np.ndarray
    s: np.ndarray
    r: np.ndarray

    @property
    def informed(self) -> np.ndarray:
        return self.n * self.r

    @property
    def states(self) -> list[PopulationFractions]:
        return [PopulationFractions(*row) for row in zip(self.i, self.s, self.r)]

    def __len__(self):
        return len(self.times)


def _check_logistic_args(i, r0, beta):
    if not (0.0 <= i < 1.0):
        raise ValueError(f"ignorant fraction i={i} outside [0, 1)")
    if beta < 0:
        raise ValueError(f"beta={beta} must be non-negative")
    if r0 <= 0:
        raise ValueError(f"r0={r0} must be positive")
    if r0 > 1.0 - i + _FEAS_TOL:
        raise InfeasibleStateError(f"r0={r0} exceeds 1 - i = {1.0 - i}")


def closed_form_r(t, i: float, r0: float, beta: float):
    """Exact transmitter fraction at time ``t`` (logistic solution).

    ``r(t) = (1-i) r0 e^{(1-i) beta t} / (1 - i - r0 + r0 e^{(1-i) beta t})``,
    evaluated in the equivalent overflow-free form with ``e^{-(1-i) beta t}``.
    Accepts scalar or array ``t``.
    """
    _check_logistic_args(i, r0, beta)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    a = 1.0 - i
    out = a * r0 / (max(0.0, a - r0) * np.exp(-a * beta * t) + r0)
    return float(out) if out.ndim == 0 else out


def closed_form_r_no_ignorant(t, r0: float, beta: float):
    """Logistic solution when nobody is ignorant (``i = 0``).

    ``r(t) = r0 e^{beta t} / (1 - r0 + r0 e^{beta t})``.
    """
    _check_logistic_args(0.0, r0, beta)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    # Same operation order as closed_form_r with a = 1.0 so the two agree bitwise.
    a = 1.0
    out = a * r0 / (max(0.0, a - r0) * np.exp(-a * beta * t) + r0)
    return float(out) if out.ndim == 0 else out


def _rk4_sr(s, r, beta, dt, n_steps):
    # Scalar RK4 on (s, r); plain floats are much faster than tiny arrays here.
    s_out = [s]
    r_out = [r]
    h2 = 0.5 * dt
    h6 = dt / 6.0
    for _ in range(n_steps):
        k1 = beta * s * r
        s2, r2 = s - h2 * k1, r + h2 * k1
        k2 = beta * s2 * r2
        s3, r3 = s - h2 * k2, r + h2 * k2
        k3 = beta * s3 * r3
        s4, r4 = s - dt * k3, r + dt * k3
        k4 = beta * s4 * r4
        inc = h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        s -= inc
        r += inc
        s_out.append(s)
        r_out.append(r)
    return np.array(s_out), np.array(r_out)


def integrate(params: ModelParams, dt: float = DEFAULT_DT, t_end: float = DEFAULT_T_END) -> Trajectory:
    """Fixed-step RK4 trajectory from the initial state of ``params``.

    The step count is ``round(t_end / dt)``; the last time point is exactly
    that many steps of ``dt``.
    """
    if dt <= 0:
        raise ValueError(f"dt={dt} must be positive")
    if t_end < dt:
        raise ValueError(f"t_end={t_end} must be >= dt={dt}")
    i, s, r = params.initial_state()
    n_steps = int(round(t_end / dt))
    s_arr, r_arr = _rk4_sr(s, r, params.beta, dt, n_steps)
    times = np.arange(n_steps + 1) * dt
    return Trajectory(params.n, times, np.full(n_steps + 1, i), s_arr, r_arr)


def time_to_level(params: ModelParams, target_r: float) -> float:
    """Time at which the logistic transmitter fraction reaches ``target_r``."""
    i = params.ignorant_fraction
    a = 1.0 - i
    r0 = params.r0
    if target_r < r0:
        raise ValueError(f"target_r={target_r} below r0={r0}")
    if target_r >= a:
        raise UnreachableLevelError(f"target_r={target_r} is at or above the saturation level {a}")
    if params.beta == 0:
        raise UnreachableLevelError("beta = 0: transmitters never increase")
    if target_r == r0:
        return 0.0
    return math.log(target_r * (a - r0) / (r0 * (a - target_r))) / (a * params.beta)


def informed_count(n: int, r):
    """People informed for transmitter fraction ``r`` (continuous, not rounded)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any((r_arr < 0) | (r_arr > 1)):
        raise ValueError("r must lie in [0, 1]")
    return n * r
