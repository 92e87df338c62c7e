"""Null-distribution calibration by fractional Brownian bridge simulation.

The limit of the statistic under ``d1 = d2 = d`` is ``U1/U2 + U2/U1`` with
``U_i`` the grid variance of independent fractional Brownian bridges.
Paths are simulated on ``k/N`` by circulant embedding of fractional
Gaussian noise; bridge integrals use right-endpoint sums over ``k = 1..N``.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, special

from .errors import InvalidInput, NumericalFailure

SHIPPED_COEFFICIENTS = (3.7, 8.6, 5.2)
DEFAULT_D_GRID = tuple(round(0.05 * k, 2) for k in range(10))
DEFAULT_REPS = 10_000
DEFAULT_GRID_SIZE = 4096
_CHUNK = 250


def fbm_constant(d: float) -> float:
    """``c(d)`` with ``c(d)^2 = cos(d pi) / B(d+1, d+1)``."""
    return float(np.sqrt(np.cos(d * np.pi) / special.beta(d + 1, d + 1)))


def fbm_cov(s, t, d: float):
    """``E B(s) B(t) = (|s|^{2d+1} + |t|^{2d+1} - |t-s|^{2d+1}) / 2``."""
    h = 2 * d + 1
    s, t = np.asarray(s, float), np.asarray(t, float)
    return 0.5 * (np.abs(s) ** h + np.abs(t) ** h - np.abs(t - s) ** h)


def _psi(d1: float, d2: float) -> float:
    return float(special.beta(d1 + 1, d2 + 1)
                 * np.sqrt(np.cos(d1 * np.pi) * np.cos(d2 * np.pi))
                 / np.sqrt(special.beta(d1 + 1, d1 + 1)
                           * special.beta(d2 + 1, d2 + 1)))


def _xlogx(u):
    u = np.asarray(u, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(u == 0, 0.0, u * np.log(np.abs(u)))


def bifbm_cov(s, t, d1: float, d2: float, rho_w: float):
    """Cross-covariance ``E B1(s) B2(t)`` of the nonanticipative bi-fBm.

    Normalized so that ``E B_i(1)^2 = 1``; for ``d1 = d2`` it reduces to
    ``rho_w`` times the fBm covariance.  The ``d1 + d2 = 0`` case uses the
    logarithmic form (the limit of the general one).
    """
    if not (-0.5 < d1 < 0.5 and -0.5 < d2 < 0.5):
        raise InvalidInput("memory parameters must lie in (-1/2, 1/2)")
    s, t = np.asarray(s, float), np.asarray(t, float)
    psi = _psi(d1, d2)
    if abs(d1 + d2) < 1e-12:
        g1 = 0.5 * psi * (np.cos(np.pi * d1) + np.cos(np.pi * d2))
        g2 = 2.0 * psi * np.sin(np.pi * d2) / np.pi
        return 0.5 * rho_w * (g1 * (np.abs(s) + np.abs(t) - np.abs(t - s))
                              + g2 * (_xlogx(t) - _xlogx(s) - _xlogx(t - s)))
    h = d1 + d2 + 1
    if abs(d1 - d2) < 1e-15:
        g12 = g21 = 1.0
    else:
        den = np.sin((d1 + d2) * np.pi)
        g12 = 2.0 * psi * np.sin(d1 * np.pi) / den
        g21 = 2.0 * psi * np.sin(d2 * np.pi) / den

    def g(u, pos, neg):
        return np.where(u > 0, pos, neg)

    return 0.5 * rho_w * (g(s, g12, g21) * np.abs(s) ** h
                          + g(t, g21, g12) * np.abs(t) ** h
                          - g(t - s, g21, g12) * np.abs(t - s) ** h)


def fgn_autocov(d: float, size: int) -> np.ndarray:
    """Unit-variance fractional Gaussian noise autocovariance, lags 0..size-1."""
    h2 = 2 * d + 1
    k = np.arange(size, dtype=float)
    return 0.5 * (np.abs(k + 1) ** h2 - 2 * k ** h2 + np.abs(k - 1) ** h2)


class _FgnSampler:
    """Draws fGn increments of ``B`` on the grid ``k/N``, k = 1..N."""

    def __init__(self, d: float, N: int):
        self.N = N
        self.scale = float(N) ** (-(d + 0.5))
        gamma = fgn_autocov(d, N + 1)
        row = np.concatenate([gamma, gamma[-2:0:-1]])  # length 2N
        lam = np.fft.fft(row).real
        self.chol = None
        if lam.min() < -1e-10 * lam.max():
            if N > 2048:
                raise NumericalFailure(
                    "circulant embedding is not non-negative definite")
            self.chol = linalg.cholesky(linalg.toeplitz(gamma[:N]), lower=True)
        else:
            self.sqrt_lam = np.sqrt(np.clip(lam, 0, None) / row.size)

    def pairs(self, rng: np.random.Generator, count: int
              ) -> Tuple[np.ndarray, np.ndarray]:
        """Two independent ``(count, N)`` arrays of increments."""
        N = self.N
        if self.chol is not None:
            z = rng.standard_normal((2, count, N))
            return (z[0] @ self.chol.T * self.scale,
                    z[1] @ self.chol.T * self.scale)
        M = 2 * N
        z = rng.standard_normal((count, M)) + 1j * rng.standard_normal((count, M))
        y = np.fft.fft(z * self.sqrt_lam, axis=1)[:, :N]
        return y.real * self.scale, y.imag * self.scale


def _paths_from_increments(inc: np.ndarray) -> np.ndarray:
    """Cumulate increments to ``B(k/N)``, k = 0..N (rows)."""
    out = np.zeros((inc.shape[0], inc.shape[1] + 1))
    np.cumsum(inc, axis=1, out=out[:, 1:])
    return out


def to_bridge(path: np.ndarray) -> np.ndarray:
    """``B0(k/N) = B(k/N) - (k/N) B(1)``; accepts one path or rows of paths."""
    path = np.asarray(path, float)
    N = path.shape[-1] - 1
    tau = np.arange(N + 1) / N
    return path - tau * path[..., -1:]


def simulate_fbm_pair(d: float, rho: float, N: int, rng_seed=None
                      ) -> Tuple[np.ndarray, np.ndarray]:
    """Two fBm paths on ``k/N`` (k = 0..N) with correlation ``rho``."""
    _check_sim_args(d, rho, N)
    rng = np.random.default_rng(rng_seed)
    z1, z2 = _FgnSampler(d, N).pairs(rng, 1)
    inc2 = rho * z1 + np.sqrt(max(1.0 - rho * rho, 0.0)) * z2
    return _paths_from_increments(z1)[0], _paths_from_increments(inc2)[0]


def simulate_fbb_pair(d: float, rho: float, N: int, rng_seed=None
                      ) -> Tuple[np.ndarray, np.ndarray]:
    """Two fractional Brownian bridges on ``k/N`` with correlation ``rho``."""
    b1, b2 = simulate_fbm_pair(d, rho, N, rng_seed)
    return to_bridge(b1), to_bridge(b2)


def _check_sim_args(d, rho, N):
    if not 0.0 <= d < 0.5:
        raise InvalidInput(f"d={d} outside [0, 0.5)")
    if abs(rho) > 1:
        raise InvalidInput(f"|rho| = {abs(rho)} exceeds 1")
    if N < 256 or N & (N - 1):
        raise InvalidInput(f"grid size N={N} must be a power of two >= 256")


def u_functional(bridge) -> np.ndarray:
    """``N^-1 sum_k B0(k/N)^2 - (N^-1 sum_k B0(k/N))^2`` over k = 1..N.

    Works row-wise on a 2-D array of bridges.
    """
    b = np.asarray(bridge, float)[..., 1:]
    m = b.mean(axis=-1)
    u = np.mean(b * b, axis=-1) - m * m
    return np.maximum(u, 0.0)


def _u_from_increments(inc: np.ndarray) -> np.ndarray:
    return u_functional(to_bridge(_paths_from_increments(inc)))


def _stream(seed, *key) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def simulate_t(d: float, reps: int, N: int = DEFAULT_GRID_SIZE, seed=0,
               rho: float = 0.0) -> np.ndarray:
    """Draws of ``T = U1/U2 + U2/U1`` (``rho = 0``: independent bridges).

    Replications are generated in fixed-size chunks with one random stream
    per chunk index, so results do not depend on scheduling.
    """
    _check_sim_args(d, rho, N)
    sampler = _FgnSampler(d, N)
    out = np.empty(reps)
    for c, start in enumerate(range(0, reps, _CHUNK)):
        count = min(_CHUNK, reps - start)
        z1, z2 = sampler.pairs(_stream(seed, c), count)
        if rho:
            z2 = rho * z1 + np.sqrt(1.0 - rho * rho) * z2
        u1, u2 = _u_from_increments(z1), _u_from_increments(z2)
        r = u1 / u2
        out[start:start + count] = r + 1.0 / r
    return out


def quantile_with_se(draws: np.ndarray, alpha: float) -> Tuple[float, float]:
    """Upper-``alpha`` empirical quantile and an order-statistic standard error."""
    x = np.sort(draws)
    n = x.size
    q = float(np.quantile(x, 1.0 - alpha))
    half = np.sqrt(n * alpha * (1.0 - alpha))
    k = (1.0 - alpha) * (n - 1)
    lo = x[int(np.clip(np.floor(k - half), 0, n - 1))]
    hi = x[int(np.clip(np.ceil(k + half), 0, n - 1))]
    return q, float(hi - lo) / 2.0


def mc_quantile(d: float, alpha: float = 0.05, reps: int = DEFAULT_REPS,
                N: int = DEFAULT_GRID_SIZE, seed=0,
                return_se: bool = False):
    """Monte-Carlo upper-``alpha`` quantile of the null limit at memory ``d``."""
    if not 0 < alpha < 1:
        raise InvalidInput("alpha must lie in (0, 1)")
    if reps < 1000:
        raise InvalidInput("need at least 1000 replications")
    q, se = quantile_with_se(simulate_t(d, reps, N, seed), alpha)
    return (q, se) if return_se else q


@dataclass
class QuantileModel:
    """Quadratic approximation ``t_alpha(d) = a d^2 + b d + c``."""

    alpha: float = 0.05
    coefficients: Tuple[float, float, float] = SHIPPED_COEFFICIENTS
    mc_table: List[Tuple[float, float]] = field(default_factory=list)
    mc_se: List[float] = field(default_factory=list)
    replications: int = 0
    grid_size: int = 0
    seed: Optional[int] = None
    max_residual: float = 0.0

    def __call__(self, d):
        a, b, c = self.coefficients
        return a * np.asarray(d) ** 2 + b * np.asarray(d) + c

    def critical_value(self, d: float) -> float:
        return float(self(d))

    def to_json(self) -> str:
        data = asdict(self)
        data["coefficients"] = list(self.coefficients)
        data["mc_table"] = [list(p) for p in self.mc_table]
        return json.dumps(data, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "QuantileModel":
        data = json.loads(text)
        return cls(alpha=float(data["alpha"]),
                   coefficients=tuple(float(c) for c in data["coefficients"]),
                   mc_table=[tuple(p) for p in data.get("mc_table", [])],
                   mc_se=list(data.get("mc_se", [])),
                   replications=int(data.get("replications", 0)),
                   grid_size=int(data.get("grid_size", 0)),
                   seed=data.get("seed"),
                   max_residual=float(data.get("max_residual", 0.0)))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "QuantileModel":
        with open(path) as fh:
            return cls.from_json(fh.read())


def shipped_model() -> QuantileModel:
    """Shipped 5% model with coefficients (3.7, 8.6, 5.2)."""
    return QuantileModel(alpha=0.05, coefficients=SHIPPED_COEFFICIENTS)


def fit_polynomial(d_grid: Sequence[float], values: Sequence[float]
                   ) -> Tuple[Tuple[float, float, float], float]:
    d = np.asarray(d_grid, float)
    v = np.asarray(values, float)
    coef = np.polyfit(d, v, 2)
    resid = float(np.max(np.abs(np.polyval(coef, d) - v)))
    return tuple(float(c) for c in coef), resid


def fit_quantile_model(alpha: float = 0.05,
                       d_grid: Sequence[float] = DEFAULT_D_GRID,
                       reps: int = DEFAULT_REPS, N: int = DEFAULT_GRID_SIZE,
                       seed: int = 0, workers: Optional[int] = None
                       ) -> QuantileModel:
    """Least-squares quadratic through Monte-Carlo quantiles on ``d_grid``."""
    d_grid = [float(d) for d in d_grid]
    if len(d_grid) < 5 or min(d_grid) > 0.0 or max(d_grid) < 0.45 - 1e-9:
        raise InvalidInput("d_grid needs >= 5 points spanning [0, 0.45]")
    args = [(d, alpha, reps, N, [seed, i]) for i, d in enumerate(d_grid)]
    from .parallel import parallel_map
    results = parallel_map(_mc_quantile_job, args, workers)
    values = [r[0] for r in results]
    coef, resid = fit_polynomial(d_grid, values)
    return QuantileModel(alpha=alpha, coefficients=coef,
                         mc_table=list(zip(d_grid, values)),
                         mc_se=[r[1] for r in results], replications=reps,
                         grid_size=N, seed=seed, max_residual=resid)


def _mc_quantile_job(args):
    d, alpha, reps, N, seed = args
    return mc_quantile(d, alpha, reps, N, seed, return_se=True)
