"""End-to-end equality test of memory parameters for one pair of series."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional

from .bandwidth import DEFAULT_PMAX, adaptive_q
from .errors import InvalidInput
from .memest import FEXP, METHOD_ALIASES, average_d, estimate_d
from .nulldist import QuantileModel, mc_quantile, shipped_model
from .series import BivariatePair
from .vstat import ONE_SIDED, PLAIN, RESIDUALIZED, t_plain, t_residualized

VARIANT_ALIASES = {"plain": PLAIN, "residualized": RESIDUALIZED,
                   "one-sided": ONE_SIDED, ONE_SIDED: ONE_SIDED}
SUBSTITUTION_NOTE = ("memory parameters estimated by {method} in place of "
                     "the broadband FEXP regression")
NEAR_COLLINEAR = 0.95
FALLBACK_MC_REPS = 4000
FALLBACK_MC_GRID = 1024


@dataclass
class TestReport:
    variant: str
    n: int
    t_value: float
    d_hat_1: float
    d_hat_2: float
    d_hat: float
    q_used: int
    q_source: str
    beta_hat: float
    rho_hat: float
    critical_value: float
    alpha: float
    reject: bool
    estimator_method: str
    i_hat: Optional[float] = None
    d_raw_1: Optional[float] = None
    d_raw_2: Optional[float] = None
    series_order: List[str] = field(default_factory=lambda: ["x1", "x2"])
    seed: Optional[int] = None
    warnings: List[str] = field(default_factory=list)

    __test__ = False  # not a pytest class

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "TestReport":
        return cls(**data)


def one_sided_critical(t_two_sided: float) -> float:
    """Root ``x > 1`` of ``x + 1/x = t``.

    Under the null ``U1/U2`` and its reciprocal share one law, so the
    upper-``alpha`` point of the ratio is this root taken at the two-sided
    quantile of level ``2 alpha``.
    """
    return 0.5 * (t_two_sided + math.sqrt(max(t_two_sided ** 2 - 4.0, 0.0)))


def _mc_critical(d_hat, level, warnings, seed):
    warnings.append(
        f"critical value from {FALLBACK_MC_REPS} Monte-Carlo bridge pairs "
        f"at d_hat (grid {FALLBACK_MC_GRID}); no quantile model for this "
        f"level")
    return mc_quantile(d_hat, level, FALLBACK_MC_REPS, FALLBACK_MC_GRID,
                       seed=0 if seed is None else seed)


def _critical_value(variant, d_hat, alpha, model, warnings, seed):
    """Polynomial model when its level matches, simulation otherwise."""
    level = alpha if variant != ONE_SIDED else 2 * alpha
    if not level < 1:
        raise InvalidInput("one-sided alpha must be below 0.5")
    if math.isclose(model.alpha, level):
        t = model.critical_value(d_hat)
    else:
        t = _mc_critical(d_hat, level, warnings, seed)
    return one_sided_critical(t) if variant == ONE_SIDED else t


def run_test(pair: BivariatePair, variant: str = PLAIN, alpha: float = 0.05,
             q: Optional[int] = None, estimator: str = FEXP,
             p_max: int = DEFAULT_PMAX,
             quantile_model: Optional[QuantileModel] = None,
             swap: bool = False, seed: Optional[int] = None) -> TestReport:
    """Estimate memories, pick the bandwidth, compute the statistic, decide.

    ``swap`` exchanges the series before the (asymmetric) residualized
    statistics, i.e. tests against ``d1 < d2``.
    """
    try:
        variant = VARIANT_ALIASES[variant]
    except KeyError:
        raise InvalidInput(f"unknown variant {variant!r}") from None
    method = METHOD_ALIASES.get(estimator)
    if method is None:
        raise InvalidInput(f"unknown estimator {estimator!r}")
    if not 0 < alpha < 1:
        raise InvalidInput("alpha must lie in (0, 1)")
    if pair.n < 128:
        raise InvalidInput(f"series length {pair.n} below the minimum 128")
    model = shipped_model() if quantile_model is None else quantile_model
    order = ["x1", "x2"]
    if swap:
        pair = pair.swapped()
        order = ["x2", "x1"]
    warnings = []
    if method != FEXP:
        warnings.append(SUBSTITUTION_NOTE.format(method=method.replace("_", " ")))

    e1 = estimate_d(pair.x1, method)
    e2 = estimate_d(pair.x2, method)
    for label, e in zip(order, (e1, e2)):
        if e.clamped:
            warnings.append(f"d_hat for {label} clamped from {e.d_raw:.4f} "
                            f"to {e.d_hat:.2f}")
    d_hat = average_d(e1, e2)

    i_value = None
    if q is None:
        bw = adaptive_q(pair, d_hat, p_max, d_hats=(e1.d_hat, e2.d_hat),
                        method=method)
        q_used, q_source, i_value = bw.q_hat, "adaptive", bw.i_hat
        if bw.clamped:
            warnings.append(f"q_hat clamped from {bw.q_raw:.2f} to {q_used}")
    else:
        q_used, q_source = int(q), "user"

    if variant == PLAIN:
        stat = t_plain(pair, q_used)
    else:
        stat = t_residualized(pair, q_used, one_sided=variant == ONE_SIDED)
        if abs(stat.rho_hat) > NEAR_COLLINEAR:
            warnings.append(f"|rho_hat| = {abs(stat.rho_hat):.3f} > "
                            f"{NEAR_COLLINEAR}: near long-run collinearity")

    crit = _critical_value(variant, d_hat, alpha, model, warnings, seed)
    return TestReport(
        variant=variant, n=pair.n, t_value=stat.t_n, d_hat_1=e1.d_hat,
        d_hat_2=e2.d_hat, d_hat=d_hat, q_used=q_used, q_source=q_source,
        beta_hat=stat.beta_hat, rho_hat=stat.rho_hat, critical_value=crit,
        alpha=alpha, reject=bool(stat.t_n > crit), estimator_method=method,
        i_hat=i_value, d_raw_1=e1.d_raw, d_raw_2=e2.d_raw,
        series_order=order, seed=seed, warnings=warnings)
