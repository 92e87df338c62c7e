"""Memory-parameter estimation from the periodogram.

Two semiparametric estimators, the log-periodogram regression and the
local Whittle estimator (the default here), use the lowest ``m`` Fourier
frequencies, ``m = floor(n ** 0.65)`` unless given.  The broadband FEXP
regression models the short-memory part with cosine terms and uses every
frequency below Nyquist; the test pipeline uses it by default.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy import linalg, optimize

from .errors import EstimationFailed, InvalidBandwidth, InvalidInput
from .series import as_series

LOCAL_WHITTLE = "local_whittle"
LOG_PERIODOGRAM = "log_periodogram"
FEXP = "fexp"
METHOD_ALIASES = {"lw": LOCAL_WHITTLE, "gph": LOG_PERIODOGRAM,
                  LOCAL_WHITTLE: LOCAL_WHITTLE,
                  LOG_PERIODOGRAM: LOG_PERIODOGRAM, FEXP: FEXP}

D_MIN, D_MAX = 0.0, 0.49
LW_BOUNDS = (-0.49, 0.99)
LW_GRID_POINTS = 200
BANDWIDTH_EXPONENT = 0.65
FEXP_ORDER_EXPONENT = 1.0 / 3.0
#: variance of log(I_j / f_j) for exponential ordinates
LOG_EXP_VARIANCE = np.pi ** 2 / 6.0


@dataclass(frozen=True)
class Periodogram:
    frequencies: np.ndarray  # 2 pi j / n, j = 1..n//2
    ordinates: np.ndarray
    n: int


@dataclass(frozen=True)
class MemoryEstimate:
    d_hat: float  # clamped to [D_MIN, D_MAX]
    d_raw: float
    method: str
    bandwidth_m: int
    std_error: float
    cosine_order: Optional[int] = None  # FEXP only

    @property
    def clamped(self) -> bool:
        return self.d_hat != self.d_raw


def periodogram(s) -> Periodogram:
    """``I(lambda_j) = |sum_t X(t) exp(-i t lambda_j)|^2 / (2 pi n)``.

    Computed on the mean-centered series at ``j = 1..floor(n/2)``.
    """
    s = as_series(s)
    n = s.n
    if n < 8:
        raise InvalidInput(f"periodogram needs n >= 8, got {n}")
    f = np.fft.rfft(s.centered())[1:n // 2 + 1]
    ordinates = (f.real ** 2 + f.imag ** 2) / (2 * np.pi * n)
    freqs = 2 * np.pi * np.arange(1, n // 2 + 1) / n
    return Periodogram(frequencies=freqs, ordinates=ordinates, n=n)


def default_bandwidth(n: int) -> int:
    return int(np.floor(n ** BANDWIDTH_EXPONENT))


def clamp_d(d: float) -> float:
    return float(min(max(d, D_MIN), D_MAX))


def _lw_objective(d, log_lam, ords, mean_log_lam):
    d = np.atleast_1d(d)
    w = np.exp(2.0 * np.outer(d, log_lam)) * ords
    return np.log(w.mean(axis=1)) - 2.0 * d * mean_log_lam


def local_whittle_objective(d, pgram: Periodogram, m: int):
    """``R(d) = log(m^-1 sum lambda_j^{2d} I_j) - 2 d m^-1 sum log lambda_j``."""
    log_lam = np.log(pgram.frequencies[:m])
    out = _lw_objective(d, log_lam, pgram.ordinates[:m], log_lam.mean())
    return out if np.ndim(d) else float(out[0])


def _local_whittle(pgram: Periodogram, m: int) -> float:
    log_lam = np.log(pgram.frequencies[:m])
    ords = pgram.ordinates[:m]
    if not np.all(ords > 0):
        raise EstimationFailed("zero periodogram ordinate in estimation band")
    mean_ll = log_lam.mean()
    grid = np.linspace(*LW_BOUNDS, LW_GRID_POINTS)
    vals = _lw_objective(grid, log_lam, ords, mean_ll)
    k = int(np.argmin(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    res = optimize.minimize_scalar(
        lambda d: float(_lw_objective(d, log_lam, ords, mean_ll)[0]),
        bounds=(lo, hi), method="bounded", options={"xatol": 1e-8})
    if not res.success or not np.isfinite(res.x):
        raise EstimationFailed(f"local Whittle refinement failed: {res.message}")
    return float(res.x) if res.fun <= vals[k] else float(grid[k])


def _log_periodogram(pgram: Periodogram, m: int) -> float:
    ords = pgram.ordinates[:m]
    if not np.all(ords > 0):
        raise EstimationFailed("zero periodogram ordinate in estimation band")
    x = -2.0 * np.log(pgram.frequencies[:m])
    y = np.log(ords)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def fexp_regression(pgram: Periodogram, m: int, p_max: int
                    ) -> Tuple[float, int, float]:
    """Broadband log-periodogram regression with ``p`` cosine terms.

    ``log I_j + gamma_E = -2 d log|1 - e^{i lambda_j}| + sum_{k<=p}
    theta_k cos(k lambda_j) + error``.  The order ``p <= p_max`` minimizes
    Mallows' ``C_p`` with the known error variance ``pi^2 / 6``.  Returns
    ``(d, p, standard error of d)``.
    """
    lam = pgram.frequencies[:m]
    ords = pgram.ordinates[:m]
    if not np.all(ords > 0):
        raise EstimationFailed("zero periodogram ordinate in estimation band")
    y = np.log(ords) + np.euler_gamma
    design = np.column_stack(
        [-2.0 * np.log(2.0 * np.sin(lam / 2.0))]
        + [np.cos(k * lam) for k in range(p_max + 1)])
    # nested models share one factorization
    q, r = np.linalg.qr(design)
    qty = q.T @ y
    rss = y @ y - np.cumsum(qty ** 2)
    cols = np.arange(2, p_max + 3)
    cp = rss[cols - 1] + 2.0 * cols * LOG_EXP_VARIANCE
    p = int(np.argmin(cp))
    k = p + 2
    coef = linalg.solve_triangular(r[:k, :k], qty[:k])
    r_inv = linalg.solve_triangular(r[:k, :k], np.eye(k))
    se = float(np.sqrt(LOG_EXP_VARIANCE * np.sum(r_inv[0] ** 2)))
    return float(coef[0]), p, se


def estimate_d(s, method: str = LOCAL_WHITTLE, m: Optional[int] = None
               ) -> MemoryEstimate:
    """Estimate the memory parameter ``d`` of one series.

    For FEXP ``m`` defaults to every frequency strictly below Nyquist and
    the cosine order is searched up to ``floor(n ** (1/3))``.
    """
    s = as_series(s)
    n = s.n
    if n < 128:
        raise InvalidInput(f"memory estimation needs n >= 128, got {n}")
    try:
        method = METHOD_ALIASES[method]
    except KeyError:
        raise InvalidInput(f"unknown estimator {method!r}") from None
    pgram = periodogram(s)
    if method == FEXP:
        m = (n - 1) // 2 if m is None else int(m)
        p_max = int(np.floor(n ** FEXP_ORDER_EXPONENT + 1e-9))
        if not p_max + 3 <= m <= (n - 1) // 2:
            raise InvalidBandwidth(
                f"m={m} must lie in [{p_max + 3}, {(n - 1) // 2}]")
        d, p, se = fexp_regression(pgram, m, p_max)
        return MemoryEstimate(d_hat=clamp_d(d), d_raw=d, method=method,
                              bandwidth_m=m, std_error=se, cosine_order=p)
    m = default_bandwidth(n) if m is None else int(m)
    if m >= n / 2:
        raise InvalidBandwidth(f"m={m} must be smaller than n/2={n / 2}")
    if m < 4:
        raise InvalidBandwidth(f"m={m} is too small")
    if method == LOCAL_WHITTLE:
        d = _local_whittle(pgram, m)
        se = 1.0 / (2.0 * np.sqrt(m))
    else:
        d = _log_periodogram(pgram, m)
        se = np.pi / np.sqrt(24.0 * m)
    return MemoryEstimate(d_hat=clamp_d(d), d_raw=d, method=method,
                          bandwidth_m=m, std_error=float(se))


def average_d(e1: Union[MemoryEstimate, float],
              e2: Union[MemoryEstimate, float]) -> float:
    """Pooled memory parameter: mean of the two clamped estimates."""
    d1 = e1.d_hat if isinstance(e1, MemoryEstimate) else clamp_d(e1)
    d2 = e2.d_hat if isinstance(e2, MemoryEstimate) else clamp_d(e2)
    return clamp_d(0.5 * (d1 + d2))
