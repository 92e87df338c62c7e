"""Gaussian FARIMA generators, univariate and bivariate."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import signal

from .errors import InvalidInput
from .series import BivariatePair, TimeSeries


def frac_integrate_coefficients(d: float, size: int) -> np.ndarray:
    """MA coefficients of ``(1 - z)^{-d}``: ``psi_k = psi_{k-1} (k-1+d) / k``."""
    k = np.arange(1, size)
    return np.concatenate(([1.0], np.cumprod((k - 1 + d) / k)))


def frac_integrate(innovations, d: float) -> np.ndarray:
    """Apply ``(1 - L)^{-d}`` to the whole buffer (zero pre-sample values)."""
    x = np.asarray(innovations, dtype=float)
    if not 0.0 <= d < 0.5:
        raise InvalidInput(f"d={d} outside [0, 0.5)")
    if d == 0.0:
        return x.copy()
    psi = frac_integrate_coefficients(d, x.size)
    return signal.fftconvolve(x, psi)[:x.size]


def ar_is_stationary(ar: Sequence[float]) -> bool:
    """True when ``1 - a_1 z - ... - a_p z^p`` has all roots outside |z| = 1."""
    ar = np.asarray(ar, dtype=float)
    if ar.size == 0 or not np.any(ar):
        return True
    # companion eigenvalues are the inverse roots
    comp = np.zeros((ar.size, ar.size))
    comp[0] = ar
    comp[1:, :-1] = np.eye(ar.size - 1)
    return bool(np.all(np.abs(np.linalg.eigvals(comp)) < 1.0))


@dataclass(frozen=True)
class FarimaSpec:
    """FARIMA(p, d, q): ``phi(L) (1-L)^d X = theta(L) eps``.

    ``ar`` holds ``a_k`` of ``phi(z) = 1 - a_1 z - ...``; ``ma`` holds
    ``b_k`` of ``theta(z) = 1 + b_1 z + ...``.
    """

    d: float = 0.0
    ar: Tuple[float, ...] = ()
    ma: Tuple[float, ...] = ()
    innovation_sd: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "ar", tuple(float(a) for a in self.ar))
        object.__setattr__(self, "ma", tuple(float(b) for b in self.ma))
        if not 0.0 <= self.d < 0.5:
            raise InvalidInput(f"d={self.d} outside [0, 0.5)")
        if self.innovation_sd <= 0:
            raise InvalidInput("innovation_sd must be positive")
        if not ar_is_stationary(self.ar):
            raise InvalidInput(f"AR polynomial {self.ar} is not stationary")

    def to_dict(self) -> dict:
        return {"d": self.d, "ar": list(self.ar), "ma": list(self.ma),
                "innovation_sd": self.innovation_sd}

    @classmethod
    def from_dict(cls, data: dict) -> "FarimaSpec":
        return cls(d=float(data.get("d", 0.0)), ar=tuple(data.get("ar", ())),
                   ma=tuple(data.get("ma", ())),
                   innovation_sd=float(data.get("innovation_sd", 1.0)))


@dataclass(frozen=True)
class BivariateNoiseSpec:
    """Innovation mixing ``eta = A xi`` with ``xi`` i.i.d. standard normal."""

    mixing: np.ndarray = field(default_factory=lambda: np.eye(2))

    def __post_init__(self):
        a = np.array(self.mixing, dtype=float).reshape(2, 2)
        if abs(np.linalg.det(a)) < 1e-12:
            raise InvalidInput("mixing matrix is degenerate")
        a.setflags(write=False)
        object.__setattr__(self, "mixing", a)

    @classmethod
    def from_p(cls, p: float) -> "BivariateNoiseSpec":
        """``a_11 = a_22 = 1 - p``, ``a_12 = a_21 = p``."""
        if not 0.0 <= p < 0.5:
            raise InvalidInput(f"p={p} outside [0, 0.5)")
        return cls(np.array([[1 - p, p], [p, 1 - p]]))

    @property
    def innovation_correlation(self) -> float:
        cov = self.mixing @ self.mixing.T
        return float(cov[0, 1] / np.sqrt(cov[0, 0] * cov[1, 1]))

    def to_dict(self) -> dict:
        return {"mixing": self.mixing.tolist()}


def default_burn_in(n: int) -> int:
    return max(1024, n // 2)


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _filter_channel(eps: np.ndarray, spec: FarimaSpec) -> np.ndarray:
    x = eps * spec.innovation_sd
    if spec.ma:
        x = signal.lfilter(np.r_[1.0, spec.ma], [1.0], x)
    x = frac_integrate(x, spec.d)
    if spec.ar:
        x = signal.lfilter([1.0], np.r_[1.0, -np.asarray(spec.ar)], x)
    return x


def gen_farima(spec: FarimaSpec, n: int, burn_in: Optional[int] = None,
               seed=None) -> TimeSeries:
    """Simulate ``n`` observations of a Gaussian FARIMA process."""
    burn = default_burn_in(n) if burn_in is None else int(burn_in)
    if burn < 512:
        raise InvalidInput("burn_in must be at least 512")
    rng = make_rng(seed)
    eps = rng.standard_normal(n + burn)
    return TimeSeries(_filter_channel(eps, spec)[burn:])


def gen_bivariate(spec1: FarimaSpec, spec2: FarimaSpec,
                  noise: Optional[BivariateNoiseSpec] = None, n: int = 1024,
                  burn_in: Optional[int] = None, seed=None) -> BivariatePair:
    """Two FARIMA channels driven by mixed bivariate Gaussian innovations."""
    noise = BivariateNoiseSpec() if noise is None else noise
    burn = default_burn_in(n) if burn_in is None else int(burn_in)
    if burn < 512:
        raise InvalidInput("burn_in must be at least 512")
    rng = make_rng(seed)
    xi = rng.standard_normal((2, n + burn))
    eta = noise.mixing @ xi
    x1 = _filter_channel(eta[0], spec1)[burn:]
    x2 = _filter_channel(eta[1], spec2)[burn:]
    return BivariatePair(TimeSeries(x1), TimeSeries(x2))
