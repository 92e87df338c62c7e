"""Two-sample ratio statistics built from rescaled variances (V/S)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import DegenerateStatistic
from .hac import beta_rho_hat, hac_triplet, residual_hac
from .series import BivariatePair, TimeSeries, v_statistic

PLAIN = "plain"
RESIDUALIZED = "residualized"
ONE_SIDED = "residualized_one_sided"
VARIANTS = (PLAIN, RESIDUALIZED, ONE_SIDED)


@dataclass(frozen=True)
class TwoSampleStat:
    t_n: float
    variant: str
    ratio1: float
    ratio2: Optional[float]
    q: int
    beta_hat: float = 0.0
    rho_hat: float = 0.0


def _vs_ratio(v: float, s: float, label: str) -> float:
    if v <= 0 or s <= 0:
        raise DegenerateStatistic(
            f"{label}: V = {v:.3g}, S = {s:.3g}; both must be positive")
    return v / s


def residualize(pair: BivariatePair, q: int) -> TimeSeries:
    """``X1(t) - beta_hat * X2(t)`` with ``beta_hat = S_12 / S_22``."""
    s11, s12, s22 = hac_triplet(pair, q)
    beta, _ = beta_rho_hat(s11, s12, s22)
    return TimeSeries(pair.x1.values - beta * pair.x2.values)


def t_plain(pair: BivariatePair, q: int) -> TwoSampleStat:
    """Sum of the V/S ratio of the two samples and its reciprocal."""
    s11, _, s22 = hac_triplet(pair, q)
    r1 = _vs_ratio(v_statistic(pair.x1), s11.value, "series 1")
    r2 = _vs_ratio(v_statistic(pair.x2), s22.value, "series 2")
    ratio = r1 / r2
    return TwoSampleStat(t_n=ratio + 1.0 / ratio, variant=PLAIN,
                         ratio1=ratio, ratio2=1.0 / ratio, q=int(q))


def t_residualized(pair: BivariatePair, q: int, one_sided: bool = False
                   ) -> TwoSampleStat:
    """Statistic after removing the long-run projection of X1 on X2.

    With ``one_sided`` only the first ratio is returned, which does not
    explode when the second series has the larger memory parameter.
    To test against ``d1 < d2`` pass ``pair.swapped()``.
    """
    s11, s12, s22 = hac_triplet(pair, q)
    beta, rho = beta_rho_hat(s11, s12, s22)
    s11_res = residual_hac(s11, s12, s22)
    x1_res = TimeSeries(pair.x1.values - beta * pair.x2.values)
    r1 = _vs_ratio(v_statistic(x1_res), s11_res.value, "residualized series 1")
    r2 = _vs_ratio(v_statistic(pair.x2), s22.value, "series 2")
    ratio = r1 / r2
    if one_sided:
        return TwoSampleStat(t_n=ratio, variant=ONE_SIDED, ratio1=ratio,
                             ratio2=None, q=int(q), beta_hat=beta, rho_hat=rho)
    return TwoSampleStat(t_n=ratio + 1.0 / ratio, variant=RESIDUALIZED,
                         ratio1=ratio, ratio2=1.0 / ratio, q=int(q),
                         beta_hat=beta, rho_hat=rho)
