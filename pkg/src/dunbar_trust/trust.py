"""Trust-value distributions.

Two families are supported: a uniform distribution on ``[lo, hi]`` and a
bounded power law with density ``p(x) ~ x**(-alpha)`` on ``[lo, hi]``.
Samples are drawn by inverse transform from a uniform driver ``y``.

The driver normally spans ``[0, 1]``.  With ``InputRange.TRUNCATED`` it spans
``[0.1, 1]`` instead, which removes the lowest tenth of the probability mass:
the effective support becomes ``[quantile(0.1), hi]`` and every survival
fraction below that point is 1.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Kind",
    "InputRange",
    "TrustDistribution",
    "uniform",
    "power_law",
    "TRUNCATED_DRIVER_LO",
]

TRUNCATED_DRIVER_LO = 0.1

_BISECT_TOL = 1e-9
_BISECT_MAX_ITER = 200


class Kind(str, enum.Enum):
    UNIFORM = "uniform"
    POWER_LAW = "powerlaw"


class InputRange(str, enum.Enum):
    FULL_UNIT = "full"
    TRUNCATED = "truncated"


@dataclass(frozen=True)
class TrustDistribution:
    """Immutable description of a trust distribution.

    Use :func:`uniform` or :func:`power_law` rather than calling this
    directly; they fill in the conventional defaults.
    """

    kind: Kind
    lo: float
    hi: float
    alpha: float | None = None
    input_range: InputRange = InputRange.FULL_UNIT

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "input_range", InputRange(self.input_range))
        if not (0.0 <= self.lo < self.hi <= 1.0):
            raise ValueError(f"support must satisfy 0 <= lo < hi <= 1, got [{self.lo}, {self.hi}]")
        if self.kind is Kind.POWER_LAW:
            if self.alpha is None:
                raise ValueError("power-law distribution needs alpha")
            if self.lo <= 0.0:
                raise ValueError("power-law lower bound must be positive")
            if self.alpha == 1.0:
                raise ValueError("alpha == 1 is not supported")
            if not (2.0 < self.alpha < 3.0):
                warnings.warn(
                    f"alpha={self.alpha} lies outside the usual power-law range (2, 3)",
                    stacklevel=3,
                )
        elif self.alpha is not None:
            raise ValueError("alpha only applies to power-law distributions")

    # -- driver <-> value map ------------------------------------------------

    @property
    def driver_lo(self) -> float:
        return TRUNCATED_DRIVER_LO if self.input_range is InputRange.TRUNCATED else 0.0

    def from_driver(self, y):
        """Map driver values ``y`` in ``[0, 1]`` to trust values.

        For the power law this is
        ``X = [(hi**k - lo**k) * y + lo**k] ** (1/k)`` with ``k = 1 - alpha``.
        The map ignores ``input_range``; callers choose where ``y`` lives.
        """
        y = np.asarray(y, dtype=float)
        if self.kind is Kind.UNIFORM:
            out = self.lo + (self.hi - self.lo) * y
        else:
            k = 1.0 - self.alpha
            lo_k, hi_k = self.lo**k, self.hi**k
            out = ((hi_k - lo_k) * y + lo_k) ** (1.0 / k)
        out = np.clip(out, self.lo, self.hi)
        return float(out) if out.ndim == 0 else out

    def _full_survival(self, x: float) -> float:
        # P(X >= x) under the untruncated [0, 1] driver.
        if x <= self.lo:
            return 1.0
        if x >= self.hi:
            return 0.0
        if self.kind is Kind.UNIFORM:
            return (self.hi - x) / (self.hi - self.lo)
        k = 1.0 - self.alpha
        return (x**k - self.hi**k) / (self.lo**k - self.hi**k)

    @property
    def support_lo(self) -> float:
        """Smallest trust value that can actually be drawn."""
        if self.driver_lo == 0.0:
            return self.lo
        return self.from_driver(self.driver_lo)

    # -- public operations ---------------------------------------------------

    def pdf(self, x: float) -> float:
        """Probability density at ``x``; raises ``ValueError`` off ``[lo, hi]``."""
        if not (self.lo <= x <= self.hi):
            raise ValueError(f"x={x} outside support [{self.lo}, {self.hi}]")
        mass = 1.0 - self.driver_lo
        if x < self.support_lo:
            return 0.0
        if self.kind is Kind.UNIFORM:
            dens = 1.0 / (self.hi - self.lo)
        else:
            k = 1.0 - self.alpha
            dens = k * x ** (-self.alpha) / (self.hi**k - self.lo**k)
        return dens / mass

    def survival_fraction(self, tc: float) -> float:
        """Fraction of the population with trust at or above ``tc``.

        This is the susceptible fraction ``f``; ``1 - f`` is ignorant.
        """
        if not (0.0 <= tc <= 1.0):
            raise ValueError(f"trust cutoff tc={tc} outside [0, 1]")
        if self.driver_lo == 0.0:
            return self._full_survival(tc)
        return min(1.0, self._full_survival(tc) / (1.0 - self.driver_lo))

    def cutoff_for_fraction(self, f: float, method: str = "closed") -> float:
        """Largest cutoff ``tc`` with ``survival_fraction(tc) == f``.

        Parameters
        ----------
        f : float
            Target survival fraction in ``(0, 1]``.
        method : {"closed", "bisect"}
            Analytic inverse, or bisection on the support (tolerance 1e-9).
        """
        if not (0.0 < f <= 1.0):
            raise ValueError(f"fraction f={f} outside (0, 1]")
        if f == 1.0:
            return self.support_lo
        if method == "bisect":
            return self._bisect(f)
        if method != "closed":
            raise ValueError(f"unknown method {method!r}")
        g = f * (1.0 - self.driver_lo)
        if self.kind is Kind.UNIFORM:
            return self.hi - g * (self.hi - self.lo)
        k = 1.0 - self.alpha
        return (g * (self.lo**k - self.hi**k) + self.hi**k) ** (1.0 / k)

    def _bisect(self, f: float) -> float:
        a, b = self.lo, self.hi
        for _ in range(_BISECT_MAX_ITER):
            mid = 0.5 * (a + b)
            if self.survival_fraction(mid) >= f:
                a = mid
            else:
                b = mid
            if b - a < _BISECT_TOL:
                break
        return 0.5 * (a + b)

    def sample(self, seed, count: int) -> np.ndarray:
        """Draw ``count`` trust values by inverse transform.

        ``seed`` is anything :func:`numpy.random.default_rng` accepts,
        including an existing ``Generator`` (which is then advanced).
        """
        if count < 1:
            raise ValueError(f"count must be >= 1, got {count}")
        rng = np.random.default_rng(seed)
        y = self.driver_lo + (1.0 - self.driver_lo) * rng.random(count)
        return self.from_driver(y)

    def label(self) -> str:
        if self.kind is Kind.UNIFORM:
            return f"uniform[{self.lo:g},{self.hi:g}]"
        tag = "" if self.input_range is InputRange.FULL_UNIT else ",truncated"
        return f"powerlaw(alpha={self.alpha:g},[{self.lo:g},{self.hi:g}]{tag})"


def uniform(lo: float = 0.0, hi: float = 1.0) -> TrustDistribution:
    return TrustDistribution(Kind.UNIFORM, lo, hi)


def power_law(
    alpha: float = 2.1,
    lo: float = 0.1,
    hi: float = 1.0,
    input_range: InputRange | str = InputRange.FULL_UNIT,
) -> TrustDistribution:
    """Bounded power law ``p(x) ~ x**(-alpha)`` on ``[lo, hi]``."""
    if math.isnan(alpha):
        raise ValueError("alpha is NaN")
    return TrustDistribution(Kind.POWER_LAW, lo, hi, alpha, InputRange(input_range))
