"""Trust cutoffs needed to reach Dunbar hierarchy layers.

A layer of size ``L`` in a population of ``N`` is reached when the
asymptotic informed count ``N * f(tc)`` is at least ``L``.  Because the
logistic solution always saturates at the full participating fraction, the
cutoff depends only on the trust distribution and ``N``; the transmission
rate ``beta`` and the seed fraction ``r0`` only change how fast it gets there.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dynamics import ModelParams, integrate
from .trust import InputRange, TrustDistribution, power_law

__all__ = [
    "DEFAULT_LAYERS",
    "DEFAULT_POPULATIONS",
    "InfeasibleLayerError",
    "CutoffResult",
    "Axis",
    "SweepTable",
    "cutoff_for_layer",
    "sweep_cutoffs",
    "cutoff_vs_population",
    "alpha_cutoff_curve",
    "beta_independence_check",
]

DEFAULT_LAYERS = (5, 15, 50, 150)
DEFAULT_POPULATIONS = (150, 500, 1500, 5000)


class InfeasibleLayerError(ValueError):
    """A layer larger than the population that can ever be informed."""


@dataclass(frozen=True)
class CutoffResult:
    n: int
    layer: int
    dist: TrustDistribution
    cutoff: float | None
    feasible: bool


class Axis(str, enum.Enum):
    TRUST_CUTOFF = "tc"
    ALPHA = "alpha"
    POPULATION_SIZE = "n"


@dataclass(frozen=True)
class SweepTable:
    """Ordered ``(x, y)`` rows; ``feasible`` flags rows whose ``y`` is defined."""

    axis: Axis
    x: np.ndarray
    y: np.ndarray
    feasible: np.ndarray

    def __post_init__(self):
        if len(self.x) > 1 and not np.all(np.diff(self.x) > 0):
            raise ValueError("sweep axis values must be strictly increasing")

    def __len__(self):
        return len(self.x)

    def rows(self):
        return list(zip(self.x.tolist(), self.y.tolist(), self.feasible.tolist()))


def validate_layers(levels) -> tuple[int, ...]:
    levels = tuple(int(v) for v in levels)
    if not levels or any(v < 1 for v in levels):
        raise ValueError("layers must be positive integers")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("layers must be strictly increasing")
    return levels


def cutoff_for_layer(dist: TrustDistribution, n: int, layer: int) -> CutoffResult:
    """Largest trust cutoff whose asymptotic informed count still reaches ``layer``.

    Rows with ``layer > n`` come back with ``feasible=False`` and no cutoff.
    """
    if n <= 1:
        raise ValueError(f"n must be > 1, got {n}")
    if layer < 1:
        raise ValueError(f"layer must be >= 1, got {layer}")
    f = layer / n
    # survival_fraction(0) == 1 for every supported law, so N is the ceiling.
    if f > dist.survival_fraction(0.0):
        return CutoffResult(n, layer, dist, None, False)
    return CutoffResult(n, layer, dist, dist.cutoff_for_fraction(f), True)


def _grid(step: float) -> np.ndarray:
    if not (0.0 < step < 1.0):
        raise ValueError(f"step={step} outside (0, 1)")
    m = 1.0 / step
    if abs(m - round(m)) < 1e-9:
        return np.linspace(0.0, 1.0, int(round(m)) + 1)
    return np.arange(0.0, 1.0 + 1e-12, step)


def sweep_cutoffs(dist: TrustDistribution, n: int, step: float = 0.01) -> SweepTable:
    """Asymptotic informed count ``n * f(tc)`` on a ``tc`` grid from 0 to 1."""
    tcs = _grid(step)
    informed = np.array([n * dist.survival_fraction(tc) for tc in tcs])
    return SweepTable(Axis.TRUST_CUTOFF, tcs, informed, np.ones(len(tcs), dtype=bool))


def cutoff_vs_population(dist: TrustDistribution, layer: int, populations) -> SweepTable:
    populations = [int(p) for p in populations]
    results = [cutoff_for_layer(dist, p, layer) for p in populations]
    cutoffs = np.array([r.cutoff if r.feasible else np.nan for r in results])
    feasible = np.array([r.feasible for r in results])
    return SweepTable(Axis.POPULATION_SIZE, np.array(populations), cutoffs, feasible)


def alpha_cutoff_curve(
    n: int,
    layer: int,
    alphas,
    lo: float = 0.1,
    hi: float = 1.0,
    input_range: InputRange | str = InputRange.FULL_UNIT,
) -> SweepTable:
    """Power-law cutoff for ``layer`` at each exponent in ``alphas``.

    Raises
    ------
    InfeasibleLayerError
        If ``layer`` exceeds ``n``.
    """
    alphas = np.asarray(sorted(float(a) for a in alphas))
    cutoffs = []
    for a in alphas:
        res = cutoff_for_layer(power_law(a, lo, hi, input_range), n, layer)
        if not res.feasible:
            raise InfeasibleLayerError(f"layer {layer} cannot be reached with n={n}")
        cutoffs.append(res.cutoff)
    return SweepTable(Axis.ALPHA, alphas, np.array(cutoffs), np.ones(len(alphas), dtype=bool))


def beta_independence_check(
    dist: TrustDistribution,
    n: int,
    layer: int,
    betas,
    r0: float | None = None,
    n_steps: int = 20_000,
    tol_persons: float = 0.5,
) -> bool:
    """True when the layer cutoff and the saturated informed count ignore ``beta``.

    The cutoff is solved once per ``beta`` and compared bitwise.  Each cutoff is
    then fed through :func:`integrate` up to ``t_end = 200 / (f * beta_min)``
    with ``n_steps`` RK4 steps, and the final informed counts must agree within
    ``tol_persons``.
    """
    betas = [float(b) for b in betas]
    if not betas or any(b <= 0 for b in betas):
        raise ValueError("betas must be non-empty and positive")
    cutoffs = []
    for _ in betas:
        res = cutoff_for_layer(dist, n, layer)
        if not res.feasible:
            raise InfeasibleLayerError(f"layer {layer} cannot be reached with n={n}")
        cutoffs.append(res.cutoff)
    if any(c != cutoffs[0] for c in cutoffs):
        return False
    f = dist.survival_fraction(cutoffs[0])
    t_end = 200.0 / (f * min(betas))
    finals = []
    for beta, tc in zip(betas, cutoffs):
        params = ModelParams(n, beta, tc, dist, r0)
        traj = integrate(params, dt=t_end / n_steps, t_end=t_end)
        finals.append(traj.informed[-1])
    return max(finals) - min(finals) <= tol_persons
