"""Two-sample test for equal long-memory parameters via V/S ratios."""

__version__ = "0.1.0"

from .bandwidth import adaptive_q, fit_ar_bic, frac_diff, i_hat
from .errors import (BandwidthTooLarge, DegenerateDenominator,
                     DegenerateResidual, DegenerateStatistic, EstimationFailed,
                     InvalidBandwidth, InvalidInput, LMTestError,
                     NumericalFailure)
from .hac import acvf, bartlett_hac, beta_rho_hat, residual_hac
from .memest import average_d, estimate_d, periodogram
from .nulldist import (QuantileModel, bifbm_cov, fit_quantile_model,
                       mc_quantile, shipped_model, simulate_fbb_pair,
                       u_functional)
from .pipeline import TestReport, run_test
from .series import BivariatePair, TimeSeries, partial_sums, v_statistic
from .simgen import (BivariateNoiseSpec, FarimaSpec, frac_integrate,
                     gen_bivariate, gen_farima)
from .vstat import TwoSampleStat, residualize, t_plain, t_residualized
