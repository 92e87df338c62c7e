"""Adaptive HAC bandwidth from fitted short-memory AR spectra.

Each series is fractionally differenced with its own memory estimate, an
AR model is selected by BIC, and the normalized spectra enter a weighted
integral ``I``.  The bandwidth is ``0.3 |I|^{1/2} n^{e(d)}`` with
``e(d) = 1/(3+4d)`` for ``d <= 1/4`` and ``1/2 - d`` above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import signal, special

from .errors import EstimationFailed, InvalidInput, NumericalFailure
from .memest import FEXP, clamp_d, estimate_d
from .series import BivariatePair, TimeSeries, as_series

Q_CONSTANT = 0.3
DEFAULT_PMAX = 10
LOW_D, HIGH_D = "low_d", "high_d"

_PANEL_NODES = 16
_MESH_DEPTH = 40
_MAX_SPLIT = 256
_QUAD_RTOL = 1e-9


def frac_diff_coefficients(d: float, size: int) -> np.ndarray:
    """Coefficients of ``(1 - z)^d``: ``pi_k = pi_{k-1} (k-1-d) / k``."""
    k = np.arange(1, size)
    return np.concatenate(([1.0], np.cumprod((k - 1 - d) / k)))


def frac_diff(s, d: float) -> TimeSeries:
    """``y(t) = sum_{k<t} pi_k(d) x(t-k)`` (no pre-sample values)."""
    s = as_series(s)
    if not 0.0 <= d < 0.5:
        raise InvalidInput(f"d={d} outside [0, 0.5)")
    if d == 0.0:
        return TimeSeries(s.values)
    pi = frac_diff_coefficients(d, s.n)
    return TimeSeries(signal.fftconvolve(s.values, pi)[:s.n])


@dataclass(frozen=True)
class ArSpectrum:
    """Spectral density ``sigma^2 / (2 pi |phi(e^{ix})|^2)`` of an AR fit.

    ``coefficients`` are ``a_k`` in ``phi(z) = 1 - a_1 z - ... - a_p z^p``.
    """

    coefficients: Tuple[float, ...]
    innovation_variance: float

    @property
    def order(self) -> int:
        return len(self.coefficients)

    @property
    def poly(self) -> np.ndarray:
        return np.r_[1.0, -np.asarray(self.coefficients, dtype=float)]

    def _abs2_phi(self, x) -> np.ndarray:
        z = np.exp(-1j * np.outer(np.atleast_1d(x), np.arange(self.order + 1)))
        v = z @ self.poly
        return v.real ** 2 + v.imag ** 2

    def density(self, x) -> np.ndarray:
        return self.innovation_variance / (2 * np.pi * self._abs2_phi(x))

    def normalized(self, x) -> np.ndarray:
        """``g(x) / g(0)``."""
        return np.sum(self.poly) ** 2 / self._abs2_phi(x)

    def deficit_over_sin2(self, x) -> np.ndarray:
        """``(1 - g(x)/g(0)) / sin^2(x/2)`` without cancellation.

        Uses ``|phi(e^{ix})|^2 - phi(1)^2 = -4 sum_m r_m sin^2(m x/2)`` with
        ``r_m`` the lag-m autocorrelation of the polynomial coefficients.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        c = self.poly
        if self.order == 0:
            return np.zeros_like(x)
        m = np.arange(1, self.order + 1)
        r = np.array([np.dot(c[:-k], c[k:]) for k in m])
        half = np.sin(x / 2.0)
        fejer = (np.sin(np.outer(x, m) / 2.0) / half[:, None]) ** 2
        return -4.0 * (fejer @ r) / self._abs2_phi(x)


def levinson_durbin(acov: np.ndarray, p_max: int):
    """AR coefficients and innovation variances for orders ``0..p_max``."""
    sigma2 = [float(acov[0])]
    coefs = [np.zeros(0)]
    phi = np.zeros(0)
    for p in range(1, p_max + 1):
        num = acov[p] - np.dot(phi, acov[p - 1:0:-1])
        kappa = num / sigma2[-1]
        if not abs(kappa) < 1.0:
            raise EstimationFailed(f"reflection coefficient {kappa} at order {p}")
        phi = np.r_[phi - kappa * phi[::-1], kappa]
        sigma2.append(sigma2[-1] * (1.0 - kappa ** 2))
        coefs.append(phi.copy())
    return coefs, np.array(sigma2)


def fit_ar_bic(s, p_max: int = DEFAULT_PMAX) -> ArSpectrum:
    """Yule-Walker AR fit with order chosen by ``n log sigma2_p + p log n``."""
    s = as_series(s)
    n = s.n
    if n < 10 * p_max:
        raise InvalidInput(f"n={n} too short for p_max={p_max}")
    x = s.centered()
    acov = np.array([np.dot(x[:n - h], x[h:]) / n for h in range(p_max + 1)])
    if not acov[0] > 0:
        raise EstimationFailed("zero sample variance")
    coefs, sigma2 = levinson_durbin(acov, p_max)
    if np.any(sigma2 <= 0):
        raise EstimationFailed("non-positive innovation variance")
    bic = n * np.log(sigma2) + np.arange(p_max + 1) * np.log(n)
    p = int(np.argmin(bic))
    return ArSpectrum(tuple(coefs[p]), float(sigma2[p]))


@lru_cache(maxsize=None)
def _gauss_legendre(k: int):
    return np.polynomial.legendre.leggauss(k)


@lru_cache(maxsize=64)
def _gauss_jacobi(k: int, beta: float):
    return special.roots_jacobi(k, 0.0, beta)


def _quadrature(g1: ArSpectrum, g2: ArSpectrum, d: float, nodes: int,
                depth: int, split: int) -> Tuple[float, float]:
    t, w = _gauss_legendre(nodes)
    edges = np.pi * 2.0 ** -np.arange(depth + 1.0)  # pi, pi/2, ...
    lo, hi = edges[1:], edges[:-1]
    if split > 1:
        frac = np.linspace(0.0, 1.0, split + 1)
        width = hi - lo
        lo, hi = ((lo[:, None] + np.outer(width, frac[:-1])).ravel(),
                  (lo[:, None] + np.outer(width, frac[1:])).ravel())
    half = 0.5 * (hi - lo)
    x = (0.5 * (hi + lo))[:, None] + half[:, None] * t
    xf = x.ravel()
    f = (g2.deficit_over_sin2(xf) - g1.deficit_over_sin2(xf)) * xf ** (-2 * d)
    f = f.reshape(x.shape)
    total = float(np.sum(half * (f @ w)))
    scale = float(np.sum(half * (np.abs(f) @ w)))
    # innermost panel [0, eps]: Gauss-Jacobi absorbs the x^{-2d} weight
    eps = edges[-1]
    tj, wj = _gauss_jacobi(nodes, -2.0 * d)
    xj = 0.5 * eps * (1.0 + tj)
    hj = g2.deficit_over_sin2(xj) - g1.deficit_over_sin2(xj)
    inner = (0.5 * eps) ** (1.0 - 2 * d) * np.dot(wj, hj)
    return total + float(inner), scale + abs(float(inner))


def i_hat(g1: ArSpectrum, g2: ArSpectrum, d: float) -> float:
    """Weighted integral of the difference of normalized spectra.

    ``int_0^pi (g1(x)/g1(0) - g2(x)/g2(0)) dx / (x^{2d} sin^2(x/2))``,
    by composite Gauss-Legendre on panels ``[pi 2^{-k-1}, pi 2^{-k}]``.

    Each panel is split uniformly, doubling the split until two successive
    values agree; AR fits with roots near the unit circle have sharp
    spectral peaks that a single panel per octave does not resolve.
    """
    if not 0.0 <= d < 0.5:
        raise InvalidInput(f"d={d} outside [0, 0.5)")
    value, scale = _quadrature(g1, g2, d, _PANEL_NODES, _MESH_DEPTH, 1)
    split = 1
    while split < _MAX_SPLIT:
        split *= 2
        check, _ = _quadrature(g1, g2, d, _PANEL_NODES, _MESH_DEPTH, split)
        if abs(value - check) <= _QUAD_RTOL * max(abs(check), 1e-6 * scale,
                                                  1e-300):
            return check
        value = check
    raise NumericalFailure(
        f"quadrature for I did not converge after splitting panels "
        f"{_MAX_SPLIT} ways (last value {value!r})")


def q_exponent(d: float) -> float:
    return 1.0 / (3.0 + 4.0 * d) if d <= 0.25 else 0.5 - d


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def q_formula(i_value: float, d: float, n: int) -> float:
    """Unrounded bandwidth ``0.3 |I|^{1/2} n^{e(d)}``."""
    return Q_CONSTANT * math.sqrt(abs(i_value)) * n ** q_exponent(d)


@dataclass(frozen=True)
class BandwidthResult:
    q_hat: int
    i_hat: float
    d_hat: float
    branch: str
    q_raw: float
    clamped: bool = False
    spectra: Optional[Tuple[ArSpectrum, ArSpectrum]] = None


def select_q(i_value: float, d: float, n: int) -> BandwidthResult:
    q_raw = q_formula(i_value, d, n)
    q = round_half_away(q_raw)
    q_max = n // 4
    q_clamped = min(max(q, 0), q_max)
    return BandwidthResult(q_hat=q_clamped, i_hat=float(i_value), d_hat=d,
                           branch=LOW_D if d <= 0.25 else HIGH_D,
                           q_raw=q_raw, clamped=q_clamped != q)


def adaptive_q(pair: BivariatePair, d_hat: float, p_max: int = DEFAULT_PMAX,
               d_hats: Optional[Sequence[float]] = None,
               method: str = FEXP) -> BandwidthResult:
    """Data-driven HAC bandwidth for the pair at pooled memory ``d_hat``.

    ``d_hats`` are the per-series estimates used for fractional
    differencing; they are estimated with ``method`` when omitted.
    """
    if not 0.0 <= d_hat <= 0.49:
        raise InvalidInput(f"d_hat={d_hat} outside [0, 0.49]")
    if d_hats is None:
        d_hats = (estimate_d(pair.x1, method).d_hat,
                  estimate_d(pair.x2, method).d_hat)
    spectra = []
    for s, di in zip((pair.x1, pair.x2), d_hats):
        y = frac_diff(TimeSeries(s.centered()), clamp_d(di))
        spectra.append(fit_ar_bic(y, p_max))
    value = i_hat(spectra[0], spectra[1], d_hat)
    res = select_q(value, d_hat, pair.n)
    return BandwidthResult(q_hat=res.q_hat, i_hat=res.i_hat, d_hat=d_hat,
                           branch=res.branch, q_raw=res.q_raw,
                           clamped=res.clamped, spectra=tuple(spectra))
