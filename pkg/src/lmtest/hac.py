"""Sample autocovariances and Bartlett-kernel long-run (co)variances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import (BandwidthTooLarge, DegenerateDenominator,
                     DegenerateResidual, InvalidInput)
from .series import BivariatePair, as_series

#: relative threshold below which a residual long-run variance is degenerate
RESIDUAL_EPS = 1e-10


@dataclass(frozen=True)
class AcvfTable:
    """Cross-autocovariances ``gamma_ab(h)`` for ``h = -q..q``."""

    q: int
    values: np.ndarray  # index h + q
    centered: bool = True

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-self.q, self.q + 1)

    def __getitem__(self, h: int) -> float:
        if abs(h) > self.q:
            raise KeyError(h)
        return float(self.values[h + self.q])


@dataclass(frozen=True)
class HacEstimate:
    value: float
    q: int
    centered: bool = True


def acvf(a, b, q: int, known_means: Optional[Tuple[float, float]] = None
         ) -> AcvfTable:
    """Truncated-sum sample cross-autocovariances with divisor ``n``.

    For ``h >= 0`` the sum runs over ``t = 1..n-h`` of
    ``(a(t) - m_a)(b(t+h) - m_b)``; for ``h < 0`` over ``t = 1-h..n``.
    The centering constants are the sample means, or ``known_means`` when
    supplied.
    """
    a = as_series(a)
    b = as_series(b)
    n = len(a)
    if len(b) != n:
        raise InvalidInput(f"length mismatch: {n} vs {len(b)}")
    q = int(q)
    if q < 0:
        raise InvalidInput("bandwidth must be non-negative")
    if q >= n:
        raise BandwidthTooLarge(f"q={q} must be smaller than n={n}")
    if known_means is None:
        xa, xb, centered = a.centered(), b.centered(), True
    else:
        xa = a.values - float(known_means[0])
        xb = b.values - float(known_means[1])
        centered = False
    out = np.empty(2 * q + 1)
    for h in range(q + 1):
        out[q + h] = np.dot(xa[:n - h], xb[h:]) / n
    for h in range(1, q + 1):
        out[q - h] = np.dot(xa[h:], xb[:n - h]) / n
    return AcvfTable(q=q, values=out, centered=centered)


def bartlett_weights(q: int) -> np.ndarray:
    h = np.arange(-q, q + 1)
    return 1.0 - np.abs(h) / (q + 1.0)


def bartlett_hac(table: AcvfTable) -> HacEstimate:
    """``S_q = sum_{|h|<=q} (1 - |h|/(q+1)) gamma(h)``."""
    value = float(np.dot(bartlett_weights(table.q), table.values))
    return HacEstimate(value=value, q=table.q, centered=table.centered)


def long_run_cov(a, b, q: int, known_means=None) -> HacEstimate:
    return bartlett_hac(acvf(a, b, q, known_means))


def hac_triplet(pair: BivariatePair, q: int
                ) -> Tuple[HacEstimate, HacEstimate, HacEstimate]:
    """``(S_11, S_12, S_22)`` for a pair at bandwidth ``q``."""
    return (long_run_cov(pair.x1, pair.x1, q),
            long_run_cov(pair.x1, pair.x2, q),
            long_run_cov(pair.x2, pair.x2, q))


def _check_same_q(*ests: HacEstimate) -> None:
    if len({e.q for e in ests}) != 1:
        raise InvalidInput("HAC estimates use different bandwidths")


def residual_hac(s11: HacEstimate, s12: HacEstimate, s22: HacEstimate
                 ) -> HacEstimate:
    """Residual long-run variance ``S_11 - S_12^2 / S_22``.

    Raises :class:`DegenerateResidual` when the result is at or below
    ``RESIDUAL_EPS * S_11``, i.e. the two series are long-run collinear.
    """
    _check_same_q(s11, s12, s22)
    if s22.value <= 0:
        raise DegenerateDenominator(f"S_22 = {s22.value!r} is not positive")
    value = s11.value - s12.value ** 2 / s22.value
    if value <= RESIDUAL_EPS * s11.value:
        raise DegenerateResidual(
            f"residual long-run variance {value:.3g} is negligible relative "
            f"to S_11 = {s11.value:.3g}; the series are long-run collinear")
    return HacEstimate(value=value, q=s11.q, centered=s11.centered)


def beta_rho_hat(s11: HacEstimate, s12: HacEstimate, s22: HacEstimate
                 ) -> Tuple[float, float]:
    """Least-squares long-run regression slope and correlation.

    The correlation is returned raw; it is not forced into [-1, 1].
    """
    if s11.value <= 0 or s22.value <= 0:
        raise DegenerateDenominator("long-run variances must be positive")
    beta = s12.value / s22.value
    rho = beta * np.sqrt(s22.value / s11.value)
    return float(beta), float(rho)
