"""Exit criteria for the package, one PASS/FAIL line each.

Run on its own with ``pytest tests/test_acceptance.py -s`` (or
``python tests/test_acceptance.py``).  Monte-Carlo criteria use 400
replications per cell and master seed 0.
"""
import math
import sys
import time

import numpy as np
import pytest

from lmtest import (BivariatePair, BivariateNoiseSpec, FarimaSpec, bifbm_cov,
                    fit_quantile_model, frac_diff, frac_integrate,
                    gen_bivariate, i_hat, run_test, t_plain, t_residualized,
                    v_statistic)
from lmtest.bandwidth import ArSpectrum, q_exponent
from lmtest.hac import long_run_cov
from lmtest.nulldist import fbm_cov, simulate_fbm_pair
from lmtest.simgen import gen_farima
from lmtest.tables import reproduce_table

pytestmark = pytest.mark.acceptance

REPS = 400
SEED = 0


def cell(table, **params):
    res, = reproduce_table(table, reps=REPS, seed=SEED, **params)
    return res


def test_c1_quantile_polynomial(verdict):
    start = time.perf_counter()
    model = fit_quantile_model(alpha=0.05, reps=10_000, N=4096, seed=SEED)
    runtime = time.perf_counter() - start
    mc = dict(model.mc_table)
    targets = {0.0: (5.2, 0.3), 0.2: (7.068, 0.4), 0.4: (9.232, 0.5)}
    parts, ok = [], runtime <= 600
    for d, (target, tol) in targets.items():
        key = min(mc, key=lambda g: abs(g - d))
        sim, fitted = mc[key], float(model(d))
        ok &= abs(sim - target) <= tol and abs(fitted - target) <= tol
        parts.append(f"d={d}: mc {sim:.3f} fit {fitted:.3f} "
                     f"(target {target} +/- {tol})")
    verdict("C1 quantile polynomial", ok,
            "; ".join(parts) + f"; runtime {runtime:.0f}s (limit 600s)")
    assert ok


def test_c2_size(verdict):
    published = {(0.0, 0.0): 4.1, (0.2, 0.0): 3.8, (0.4, 0.0): 3.6,
             (0.0, 0.8): 2.2, (0.2, 0.8): 3.8, (0.4, 0.8): 3.5}
    parts, ok = [], True
    for (d, a), target in published.items():
        res = cell(1, d1=d, d2=d, a1=a, a2=a)
        good = abs(res.reject_pct - target) <= 4.0
        ok &= good
        parts.append(f"(d={d},a={a}) {res.reject_pct:.2f}% vs {target}")
    verdict("C2 size, tolerance 4 points", ok, "; ".join(parts))
    assert ok


def test_c3_power(verdict):
    parts, ok = [], True
    for table, target in ((1, 84.0), (2, 96.0)):
        res = cell(table, d1=0.4, d2=0.0, a1=0.0, a2=0.0)
        ok &= abs(res.reject_pct - target) <= 6.0
        parts.append(f"n={res.cell.n} {res.reject_pct:.2f}% vs {target}")
    verdict("C3 power (.4,0,0,0), tolerance 6 points", ok, "; ".join(parts))
    assert ok


def test_c4_dependent_samples(verdict):
    power = cell(4, p=0.35, n=1024, d1=0.3, d2=0.0)
    size = cell(4, p=0.35, n=1024, d1=0.2, d2=0.2)
    ok_power = abs(power.reject_pct - 81.0) <= 6.0
    ok_size = abs(size.reject_pct - 4.7) <= 4.0
    verdict("C4 dependent samples p=0.35 n=1024", ok_power and ok_size,
            f"(.3,0) {power.reject_pct:.2f}% vs 81 +/- 6; "
            f"(.2,.2) {size.reject_pct:.2f}% vs 4.7 +/- 4")
    assert ok_power and ok_size


def test_c5_mean_bandwidth(verdict):
    ar = cell(3, d1=0.0, d2=0.0, a1=0.8, a2=0.8)
    lm = cell(3, d1=0.4, d2=0.4, a1=0.0, a2=0.0)
    ok_ar = abs(ar.mean_q - 10.2) <= 0.2 * 10.2
    ok_lm = abs(lm.mean_q - 0.3) <= 0.3
    verdict("C5 mean adaptive q, n=4096", ok_ar and ok_lm,
            f"a=.8,d=0 {ar.mean_q:.3f} vs 10.2 +/- 20%; "
            f"a=0,d=.4 {lm.mean_q:.3f} vs 0.3 +/- 0.3")
    assert ok_ar and ok_lm


def test_c6_misspecified_short_memory(verdict):
    parts, ok = [], True
    for d in (0.0, 0.1, 0.2, 0.3, 0.4):
        res = cell(6, d1=d, d2=d)
        ok &= abs(res.reject_pct - 5.0) <= 4.0
        parts.append(f"({d},{d}) {res.reject_pct:.2f}%")
        if d == 0.0:
            mean_q = res.mean_q
    ok &= abs(mean_q - 7.0) <= 2.0
    verdict("C6 MA(2) misspecification, n=4096", ok,
            "diagonal vs 5 +/- 4: " + ", ".join(parts)
            + f"; mean q (0,0) {mean_q:.2f} vs 7.0 +/- 2")
    assert ok


def _property_checks():
    rng = np.random.default_rng(SEED)
    checks = {}

    pairs = []
    for _ in range(200):
        n = int(rng.integers(64, 512))
        z = rng.standard_normal((2, n))
        x1 = np.cumsum(z[0]) * rng.uniform(0, 0.3) + z[0]
        pairs.append(BivariatePair.from_arrays(x1, rng.uniform(-1, 1) * z[0] + z[1]))
    qs = rng.integers(0, 20, len(pairs))
    checks["T >= 2"] = all(
        t_plain(p, q).t_n >= 2 - 1e-12 and t_residualized(p, q).t_n >= 2 - 1e-12
        for p, q in zip(pairs, qs))

    ok = True
    for p, q in zip(pairs[:100], qs):
        c1, c2 = rng.uniform(0.01, 100, 2) * rng.choice([-1, 1], 2)
        m1, m2 = rng.uniform(-1e3, 1e3, 2)
        moved = BivariatePair.from_arrays(c1 * p.x1.values + m1,
                                          c2 * p.x2.values + m2)
        ok &= math.isclose(v_statistic(moved.x1), c1 * c1 * v_statistic(p.x1),
                           rel_tol=1e-6)
        ok &= math.isclose(long_run_cov(moved.x1, moved.x2, q).value,
                           c1 * c2 * long_run_cov(p.x1, p.x2, q).value,
                           rel_tol=1e-6, abs_tol=1e-9 * abs(c1 * c2))
        ok &= math.isclose(t_plain(moved, q).t_n, t_plain(p, q).t_n, rel_tol=1e-7)
        ok &= math.isclose(t_residualized(moved, q).t_n,
                           t_residualized(p, q).t_n, rel_tol=1e-6)
    checks["scale/shift invariance"] = ok

    ok = True
    for _ in range(1000):
        n = int(rng.integers(2, 300))
        x = rng.standard_normal(n) * rng.uniform(0.1, 10)
        if rng.random() < 0.5:
            x = np.cumsum(x)
        q = int(rng.integers(0, n))
        ok &= long_run_cov(x, x, q).value >= -1e-10 * np.dot(x, x)
    checks["HAC non-negative (1000 inputs)"] = bool(ok)

    ok = True
    for _ in range(30):
        a1 = tuple(rng.uniform(-0.3, 0.3, int(rng.integers(0, 4))))
        a2 = tuple(rng.uniform(-0.3, 0.3, int(rng.integers(0, 4))))
        d = float(rng.uniform(0, 0.49))
        g1, g2 = ArSpectrum(a1, 1.0), ArSpectrum(a2, 1.0)
        ok &= i_hat(g1, g1, d) == 0.0
        ok &= math.isclose(i_hat(g1, g2, d), -i_hat(g2, g1, d),
                           rel_tol=1e-12, abs_tol=1e-12)
    checks["I antisymmetry and zero"] = bool(ok)

    checks["exponent continuity at 1/4"] = (
        q_exponent(0.25) == 1 / (3 + 4 * 0.25) == 0.5 - 0.25)

    reps, N, d, rho = 10_000, 256, 0.3, 0.6
    paths = np.empty((2, reps, N + 1))
    for i in range(reps):
        paths[0, i], paths[1, i] = simulate_fbm_pair(d, rho, N, [SEED, 90, i])
    grid = np.array([0.2, 0.4, 0.6, 0.8, 1.0])
    idx = (grid * N).astype(int)
    worst = 0.0
    for i, s in zip(idx, grid):
        for j, t in zip(idx, grid):
            for a, b, target in ((0, 0, fbm_cov(s, t, d)),
                                 (0, 1, bifbm_cov(s, t, d, d, rho))):
                prod = paths[a, :, i] * paths[b, :, j]
                z = abs(prod.mean() - float(target)) / (prod.std() / math.sqrt(reps))
                worst = max(worst, z)
    checks[f"fBm covariance within 4 SE (worst {worst:.2f})"] = worst < 4

    s = rng.uniform(-2, 2, 50)
    t = rng.uniform(-2, 2, 50)
    checks["bi-fBm equal-d reduction"] = all(
        np.array_equal(bifbm_cov(s, t, dd, dd, 0.7), 0.7 * fbm_cov(s, t, dd))
        for dd in (0.0, 0.15, 0.3, 0.45))

    x = gen_farima(FarimaSpec(), 4096, seed=[SEED, 91]).values
    err = max(np.abs(frac_integrate(frac_diff(x, dd).values, dd)[2048:]
                     - x[2048:]).max() / np.abs(x).max() for dd in (0.1, 0.3, 0.45))
    checks[f"frac round trip (err {err:.1e})"] = err < 1e-6

    c11 = (2 * math.gamma(0.6) * math.sin(0.2 * math.pi) / (0.2 * 1.4)
           / (2 * math.pi))
    trend = []
    for n, q, r in ((2**12, 16, 40), (2**14, 32, 20), (2**16, 64, 10)):
        trend.append(np.mean([
            q ** -0.4 * long_run_cov(y, y, q).value
            for y in (gen_farima(FarimaSpec(0.2), n, seed=[SEED, 92, n, k])
                      for k in range(r))]))
    checks["HAC trend " + "/".join(f"{v:.3f}" for v in trend)
           + f" vs {c11:.3f}"] = all(abs(v / c11 - 1) <= 0.10 for v in trend)
    return checks


def test_c7_property_suite(verdict):
    checks = _property_checks()
    failed = [k for k, v in checks.items() if not v]
    verdict("C7 property suite", not failed,
            "; ".join(f"{k}: {'ok' if v else 'FAILED'}" for k, v in checks.items()))
    assert not failed


def test_c8_plateau(verdict):
    noise = BivariateNoiseSpec.from_p(0.35)
    rho = float(bifbm_cov(1.0, 1.0, 0.0, 0.4, noise.innovation_correlation))
    plateau = rho**2 / (1 - rho**2) + (1 - rho**2) / rho**2
    draws, qs = [], []
    for i in range(REPS):
        pair = gen_bivariate(FarimaSpec(0.0), FarimaSpec(0.4), noise, 4096,
                             seed=[SEED, 8, i])
        rep = run_test(pair, variant="residualized")
        draws.append(rep.t_value)
        qs.append(rep.q_used)
    median = float(np.median(draws))
    ok = abs(median - plateau) <= 0.3 * plateau
    verdict("C8 plateau d=(0,.4), p=0.35, n=4096", ok,
            f"median T {median:.3f} vs {plateau:.3f} +/- 30% "
            f"(rho {rho:.4f}, mean adaptive q {np.mean(qs):.2f})")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
