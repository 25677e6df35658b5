"""lamperti-lab: exact simulation and ergodic diagnostics for scaled
Lamperti transforms of sub- and bi-fractional Brownian motion."""

__version__ = "0.1.0"

from .kernels import (AcfEvaluator, AcfFamily, HurstParams, acf_bi_lamperti,
                      acf_sub_lamperti, asymp_sub_two_term, bi_fbm_cov,
                      lamperti_acf, mixing_rate_bi, mixing_rate_sub,
                      sub_fbm_cov)
from .sampler import (CholFactor, Family, GridKind, ModelSpec, PathEnsemble,
                      TimeGrid, build_grid, covariance_matrix, explicit_grid,
                      factorize, geometric_grid, sample_ensemble,
                      stationary_covariance_matrix)
from .lamperti import LampertiMap, forward, inverse, moment_reconstruct
from .langevin import (LangevinSpec, QuadratureConfig, langevin_cov,
                       langevin_lt_cov, mixed_deriv_bi, mixed_deriv_sub,
                       sample_langevin_path, tabulate_lt_acf)
from .ergodics import (ErgodicReport, build_ergodic_report, empirical_acf,
                       empirical_cf, fit_decay_rate, mixing_tail,
                       sample_stationary_ensemble, time_average)
