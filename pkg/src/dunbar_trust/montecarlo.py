"""Agent-level stochastic realisation of the mean-field dynamics.

Agents draw trust values from the configured distribution; those below the
cutoff are ignorant.  Contacts are well mixed, so conversions S -> R happen
as a pure-birth process with rate ``beta * S * R / N``.  Because that rate is
determined by how many conversions have already happened, each run can draw
all its exponential waiting times in one vectorised call.

Run ``k`` of an ensemble is seeded from ``SeedSequence([seed, k])``, so the
result does not depend on how runs are scheduled across workers.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import InfeasibleStateError, ModelParams
from .trust import TrustDistribution

__all__ = [
    "Status",
    "NoSeedTransmitterError",
    "AgentPopulation",
    "RunResult",
    "EnsembleResult",
    "assign_trust",
    "simulate_run",
    "simulate_ensemble",
    "level_passage_times",
]

DEFAULT_GRID_POINTS = 200


class Status(enum.IntEnum):
    SUSCEPTIBLE = 0
    IGNORANT = 1
    TRANSMITTER = 2


class NoSeedTransmitterError(InfeasibleStateError):
    """Nobody is at or above the cutoff, so nobody can start spreading."""


@dataclass(frozen=True)
class AgentPopulation:
    trust: np.ndarray
    status: np.ndarray
    tc: float

    @property
    def n(self) -> int:
        return len(self.trust)

    def count(self, status: Status) -> int:
        return int(np.count_nonzero(self.status == status))


def _run_rng(seed: int, k: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, k]))


def assign_trust(
    n: int,
    dist: TrustDistribution,
    tc: float,
    seed,
    transmitters: int = 1,
) -> AgentPopulation:
    """Sample trust for ``n`` agents and promote ``transmitters`` of the eligible ones.

    Raises
    ------
    NoSeedTransmitterError
        When fewer than ``transmitters`` agents have trust >= ``tc``.
    """
    if n <= 1:
        raise ValueError(f"n must be > 1, got {n}")
    if not (0.0 <= tc <= 1.0):
        raise ValueError(f"tc={tc} outside [0, 1]")
    rng = np.random.default_rng(seed)
    trust = dist.sample(rng, n)
    status = np.where(trust < tc, Status.IGNORANT, Status.SUSCEPTIBLE).astype(np.int8)
    eligible = np.flatnonzero(status == Status.SUSCEPTIBLE)
    if len(eligible) < transmitters:
        raise NoSeedTransmitterError(
            f"only {len(eligible)} agents at or above tc={tc}, need {transmitters}"
        )
    chosen = rng.choice(eligible, size=transmitters, replace=False)
    status[chosen] = Status.TRANSMITTER
    return AgentPopulation(trust, status, tc)


@dataclass(frozen=True)
class RunResult:
    """Event times of one run; ``event_times[j]`` is when transmitter ``R0 + j + 1`` appeared."""

    n: int
    initial_transmitters: int
    eligible: int
    event_times: np.ndarray

    @property
    def final_informed(self) -> int:
        return self.initial_transmitters + len(self.event_times)

    @property
    def absorbed(self) -> bool:
        return self.final_informed == self.eligible

    def transmitters_at(self, times) -> np.ndarray:
        # Right-continuous step function.
        return self.initial_transmitters + np.searchsorted(self.event_times, times, side="right")


def simulate_run(params: ModelParams, t_end: float, rng: np.random.Generator) -> RunResult:
    """Exact event-driven run until no susceptibles remain or ``t_end`` passes."""
    r_init = max(1, int(round(params.r0 * params.n)))
    pop = assign_trust(params.n, params.dist, params.tc, rng, transmitters=r_init)
    s0 = pop.count(Status.SUSCEPTIBLE)
    eligible = s0 + r_init
    if params.beta == 0 or s0 == 0:
        return RunResult(params.n, r_init, eligible, np.empty(0))
    k = np.arange(s0)
    rates = params.beta * (s0 - k) * (r_init + k) / params.n
    times = np.cumsum(rng.exponential(1.0 / rates))
    times = times[times <= t_end]
    return RunResult(params.n, r_init, eligible, times)


@dataclass(frozen=True)
class EnsembleResult:
    times: np.ndarray
    mean_r: np.ndarray
    std_r: np.ndarray
    runs: int
    seed: int
    final_informed: np.ndarray
    eligible: np.ndarray


def _collect(params, t_end, seed, runs, workers):
    def one(k):
        return simulate_run(params, t_end, _run_rng(seed, k))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, range(runs)))
    return [one(k) for k in range(runs)]


def simulate_ensemble(
    params: ModelParams,
    runs: int,
    t_end: float,
    seed: int,
    n_points: int = DEFAULT_GRID_POINTS,
    workers: int | None = None,
) -> EnsembleResult:
    """Ensemble mean and standard deviation of the transmitter fraction.

    Each run is sampled on ``n_points`` uniform times over ``[0, t_end]``.
    Results are reduced in run order, so ``workers`` never changes the output.
    """
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    if t_end <= 0:
        raise ValueError(f"t_end={t_end} must be positive")
    grid = np.linspace(0.0, t_end, n_points)
    results = _collect(params, t_end, seed, runs, workers)
    r = np.stack([res.transmitters_at(grid) for res in results]) / params.n
    return EnsembleResult(
        times=grid,
        mean_r=r.mean(axis=0),
        std_r=r.std(axis=0),
        runs=runs,
        seed=seed,
        final_informed=np.array([res.final_informed for res in results]),
        eligible=np.array([res.eligible for res in results]),
    )


def level_passage_times(
    params: ModelParams,
    target_r: float,
    runs: int,
    t_end: float,
    seed: int,
    workers: int | None = None,
) -> np.ndarray:
    """Per-run first time the transmitter count reaches ``target_r * N``.

    Runs that never get there within ``t_end`` report ``inf``.
    """
    target = int(np.ceil(target_r * params.n - 1e-9))
    out = np.full(runs, np.inf)
    for k, res in enumerate(_collect(params, t_end, seed, runs, workers)):
        if res.initial_transmitters >= target:
            out[k] = 0.0
            continue
        j = target - res.initial_transmitters - 1
        if j < len(res.event_times):
            out[k] = res.event_times[j]
    return out
