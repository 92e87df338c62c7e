"""Sample containers, centered partial sums and the V statistic."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np

from .errors import InvalidInput


@numba.njit(cache=True)
def _kahan_cumsum(x):
    out = np.empty_like(x)
    total = 0.0
    comp = 0.0
    for k in range(x.shape[0]):
        y = x[k] - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[k] = total
    return out


@dataclass(frozen=True)
class TimeSeries:
    """A single real-valued sample ``X(1), ..., X(n)``.

    ``known_mean`` is the optional population mean used by the known-mean
    autocovariance variant; it never affects centering of ``values``.
    """

    values: np.ndarray
    known_mean: Optional[float] = None
    mean: float = field(init=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True).ravel()
        if vals.size < 2:
            raise InvalidInput(f"series needs at least 2 values, got {vals.size}")
        if not np.all(np.isfinite(vals)):
            raise InvalidInput("series contains non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "mean", float(np.mean(vals)))

    def __len__(self) -> int:
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size

    def centered(self) -> np.ndarray:
        return self.values - self.mean


@dataclass(frozen=True)
class BivariatePair:
    """Two aligned samples of identical length."""

    x1: TimeSeries
    x2: TimeSeries

    def __post_init__(self):
        if not isinstance(self.x1, TimeSeries):
            object.__setattr__(self, "x1", TimeSeries(self.x1))
        if not isinstance(self.x2, TimeSeries):
            object.__setattr__(self, "x2", TimeSeries(self.x2))
        if len(self.x1) != len(self.x2):
            raise InvalidInput(
                f"pair lengths differ: {len(self.x1)} vs {len(self.x2)}")

    @property
    def n(self) -> int:
        return len(self.x1)

    def swapped(self) -> "BivariatePair":
        return BivariatePair(self.x2, self.x1)

    @classmethod
    def from_arrays(cls, a, b) -> "BivariatePair":
        return cls(TimeSeries(a), TimeSeries(b))


def as_series(s) -> TimeSeries:
    return s if isinstance(s, TimeSeries) else TimeSeries(s)


def partial_sums(s) -> np.ndarray:
    """Centered partial sums ``S_k = sum_{t<=k} (X(t) - mean)``, k = 1..n.

    Accumulation is compensated so that ``S_n`` stays at rounding level
    even for long paths.
    """
    s = as_series(s)
    return _kahan_cumsum(s.centered())


def v_statistic(s) -> float:
    """Empirical variance of the centered partial-sum path.

    ``V = n^-2 sum_k S_k^2 - n^-3 (sum_k S_k)^2``; non-negative up to
    rounding, and clipped at zero.
    """
    s = as_series(s)
    n = s.n
    sums = partial_sums(s)
    v = np.dot(sums, sums) / n**2 - np.sum(sums) ** 2 / n**3
    return max(float(v), 0.0)
