import math

import numpy as np
import pytest
from scipy import integrate, special

from lmtest import (InvalidInput, QuantileModel, bifbm_cov, mc_quantile,
                    shipped_model, simulate_fbb_pair, u_functional)
from lmtest.nulldist import (fbm_constant, fbm_cov, fit_polynomial,
                             quantile_with_se, simulate_fbm_pair, simulate_t)


def ma_kernel(t, x, d):
    if d == 0:
        return float(0 < x <= t) if t >= 0 else -float(t < x <= 0)
    a = t - x
    b = -x
    return (a ** d if a > 0 else 0.0) - (b ** d if b > 0 else 0.0)


def ma_oracle(s, t, d1, d2):
    """E B1(s) B2(t) from the moving-average integral, by plain quadrature."""
    const = math.sqrt(math.cos(d1 * math.pi) / special.beta(d1 + 1, d1 + 1)
                      * math.cos(d2 * math.pi) / special.beta(d2 + 1, d2 + 1))
    f = lambda x: ma_kernel(s, x, d1) * ma_kernel(t, x, d2)
    pts = sorted({0.0, s, t})
    segs = [(-np.inf, pts[0])] + list(zip(pts[:-1], pts[1:]))
    total = sum(integrate.quad(f, a, b, limit=500, epsabs=1e-12)[0]
                for a, b in segs if a != b)
    return const * total


def test_normalizing_constant():
    assert fbm_constant(0.0) == 1.0
    assert float(fbm_cov(1.0, 1.0, 0.3)) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("d", [0.0, 0.1, 0.3, 0.45])
def test_bifbm_equal_d_reduces_to_fbm(d):
    s = np.array([0.1, 0.5, 1.0, 1.7, -0.4])
    t = np.array([0.3, 0.5, 2.0, 0.2, 0.9])
    np.testing.assert_array_equal(bifbm_cov(s, t, d, d, 0.6),
                                  0.6 * fbm_cov(s, t, d))
    assert float(bifbm_cov(1.0, 1.0, d, d, 1.0)) == 1.0


@pytest.mark.parametrize("d1,d2", [(0.2, -0.2), (-0.2, 0.2), (0.0, 0.4),
                                   (0.1, 0.3)])
@pytest.mark.parametrize("s,t", [(1.0, 1.0), (0.5, 1.5), (-1.0, 0.7),
                                 (2.0, -1.0)])
def test_bifbm_against_moving_average_oracle(d1, d2, s, t):
    expected = ma_oracle(s, t, d1, d2)
    assert float(bifbm_cov(s, t, d1, d2, 1.0)) == pytest.approx(
        expected, rel=1e-3, abs=1e-9)


def test_bifbm_domain():
    with pytest.raises(InvalidInput):
        bifbm_cov(1.0, 1.0, 0.5, 0.0, 1.0)


def test_brownian_increments_uncorrelated():
    b1, _ = simulate_fbm_pair(0.0, 0.0, 4096, 1)
    inc = np.diff(b1)
    r = [np.corrcoef(inc[:-h], inc[h:])[0, 1] for h in (1, 2, 5)]
    assert max(abs(v) for v in r) < 4 / math.sqrt(4096)


def test_perfect_correlation_gives_identical_paths():
    b1, b2 = simulate_fbb_pair(0.3, 1.0, 512, 4)
    np.testing.assert_array_equal(b1, b2)


def _paths(d, rho, reps, N=256):
    out = np.empty((2, reps, N + 1))
    for i in range(reps):
        out[0, i], out[1, i] = simulate_fbm_pair(d, rho, N, [70, i])
    return out


@pytest.fixture(scope="module")
def fbm_paths():
    return _paths(0.3, 0.6, 10_000)


def test_unit_variance_at_one(fbm_paths):
    end = fbm_paths[0, :, -1]
    se = math.sqrt(2.0 / end.size)
    assert abs(np.var(end) - 1.0) < 3 * se


def test_covariance_grid_matches_oracle(fbm_paths):
    N = fbm_paths.shape[2] - 1
    grid = np.array([0.2, 0.4, 0.6, 0.8, 1.0])
    idx = (grid * N).astype(int)
    for i, s in zip(idx, grid):
        for j, t in zip(idx, grid):
            for a, b, target in ((0, 0, fbm_cov(s, t, 0.3)),
                                 (0, 1, bifbm_cov(s, t, 0.3, 0.3, 0.6))):
                prod = fbm_paths[a, :, i] * fbm_paths[b, :, j]
                se = prod.std() / math.sqrt(prod.size)
                assert abs(prod.mean() - float(target)) < 4 * se


def test_bridge_endpoints():
    b1, b2 = simulate_fbb_pair(0.2, 0.0, 256, 3)
    assert b1[0] == 0.0 and abs(b1[-1]) < 1e-12 and abs(b2[-1]) < 1e-12


def test_simulation_argument_checks():
    with pytest.raises(InvalidInput):
        simulate_fbb_pair(0.5, 0.0, 256, 0)
    with pytest.raises(InvalidInput):
        simulate_fbb_pair(0.2, 1.5, 256, 0)
    with pytest.raises(InvalidInput):
        simulate_fbb_pair(0.2, 0.0, 300, 0)


def test_u_functional_examples(rng):
    assert u_functional(np.zeros(9)) == 0.0
    assert u_functional(np.array([0.0, 1.0, 0.0])) == pytest.approx(0.25)
    path = np.cumsum(rng.standard_normal(65))
    assert u_functional(-path) == pytest.approx(u_functional(path))
    assert u_functional(path) == pytest.approx(np.var(path[1:]))


def test_t_draws_at_least_two():
    draws = simulate_t(0.0, 2000, 256, seed=9)
    assert np.all(draws >= 2.0 - 1e-12)


def test_quantile_decreasing_in_alpha():
    qs = [mc_quantile(0.2, a, reps=2000, N=256, seed=5)
          for a in (0.01, 0.05, 0.1, 0.5)]
    assert all(a > b for a, b in zip(qs, qs[1:]))


def test_quantile_se_shrinks_with_reps():
    draws = simulate_t(0.1, 10_000, 256, seed=2)
    _, se_small = quantile_with_se(draws[:1000], 0.05)
    _, se_big = quantile_with_se(draws, 0.05)
    assert se_small > se_big


def test_fit_polynomial_constant_and_residual():
    coef, resid = fit_polynomial([0, 0.1, 0.2, 0.3, 0.4], [6.0] * 5)
    np.testing.assert_allclose(coef, (0.0, 0.0, 6.0), atol=1e-10)
    assert resid < 1e-10
    grid = [0.0, 0.1, 0.2, 0.3, 0.45]
    vals = [5.1, 6.0, 7.2, 8.1, 9.9]
    coef, resid = fit_polynomial(grid, vals)
    model = QuantileModel(alpha=0.05, coefficients=coef)
    assert np.max(np.abs(model(np.array(grid)) - vals)) <= resid + 1e-12


def test_shipped_model():
    m = shipped_model()
    assert m.critical_value(0.0) == pytest.approx(5.2)
    vals = m(np.linspace(0, 0.49, 50))
    assert np.all(np.diff(vals) > 0)


def test_model_json_round_trip(tmp_path):
    m = QuantileModel(alpha=0.1, coefficients=(1.5, 2.25, 4.125),
                      mc_table=[(0.0, 4.1), (0.2, 4.9)], mc_se=[0.03, 0.04],
                      replications=1000, grid_size=256, seed=3,
                      max_residual=0.01)
    path = tmp_path / "m.json"
    m.save(path)
    assert QuantileModel.load(path) == m
