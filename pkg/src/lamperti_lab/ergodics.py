"""Single-trajectory and ensemble diagnostics.

Birkhoff time averages and empirical characteristic functions use the
trapezoid rule on uniform grids; empirical autocovariances are ensemble and
time averaged with jackknife-over-trajectories standard errors (temporal
correlation inside a path makes naive errors invalid); decay rates are least
squares fits to log R on windows placed in units of 1/nominal_rate so that
subleading exponentials are negligible.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np
import scipy.integrate

from .errors import DomainError, GridError
from .kernels import AcfEvaluator, HurstParams, lamperti_acf
from .sampler import (GridKind, PathEnsemble, TimeGrid, factorize,
                      sample_ensemble, stationary_covariance_matrix)

__all__ = [
    "ErgodicReport",
    "time_average",
    "empirical_cf",
    "empirical_acf",
    "fit_decay_rate",
    "mixing_tail",
    "moment_tolerance",
    "sample_stationary_ensemble",
    "build_ergodic_report",
    "jackknife_se",
]

ACF_FLOOR = 1e-14


def _uniform_spacing(grid: TimeGrid) -> float:
    if not grid.is_uniform():
        raise GridError("this estimator needs a uniform grid")
    return grid.spacing


def _trapezoid_weights(n: int, du: float) -> np.ndarray:
    w = np.full(n, du)
    w[0] = w[-1] = 0.5 * du
    return w


def time_average(grid: TimeGrid, path: np.ndarray, f) -> float:
    """Trapezoidal (1/T) int_0^T f(X(s)) ds along one trajectory."""
    du = _uniform_spacing(grid)
    path = np.asarray(path, dtype=float)
    T = du * (path.size - 1)
    w = _trapezoid_weights(path.size, du)
    return float(np.dot(w, f(path))) / T


def empirical_cf(grid: TimeGrid, path: np.ndarray, k_grid) -> np.ndarray:
    """Time-averaged e^{i k X(s)} for each k (complex array)."""
    du = _uniform_spacing(grid)
    path = np.asarray(path, dtype=float)
    k = np.asarray(k_grid, dtype=float)
    T = du * (path.size - 1)
    w = _trapezoid_weights(path.size, du)
    return (np.exp(1j * np.outer(k, path)) * w).sum(axis=1) / T


def jackknife_se(per_unit_stats: np.ndarray) -> float:
    """Leave-one-out standard error of the mean of per-trajectory statistics."""
    x = np.asarray(per_unit_stats, dtype=float)
    m = x.size
    if m < 2:
        return float("nan")
    total = x.sum()
    loo = (total - x) / (m - 1)
    return float(np.sqrt((m - 1) / m * np.sum((loo - loo.mean()) ** 2)))


def empirical_acf(ensemble: PathEnsemble, max_lag: float):
    """Ensemble-and-time averaged autocovariance on a uniform latent grid.

    Returns (lags, estimates, standard_errors); the process is treated as
    centred (no mean subtraction)."""
    grid = ensemble.grid
    u = grid.latent if grid.latent is not None else grid.points
    d = np.diff(u)
    if not np.allclose(d, d[0], rtol=1e-9, atol=0.0):
        raise GridError("empirical_acf needs a uniform (latent) grid")
    du = float(d[0])
    span = u[-1] - u[0]
    if max_lag >= span:
        raise DomainError(f"max_lag {max_lag} must be below the grid span {span}")
    n = len(grid)
    n_lags = int(np.floor(max_lag / du)) + 1
    paths = ensemble.paths
    lags = np.arange(n_lags) * du
    est = np.empty(n_lags)
    se = np.empty(n_lags)
    for ell in range(n_lags):
        prods = paths[:, : n - ell] * paths[:, ell:]
        per_traj = prods.mean(axis=1)
        est[ell] = per_traj.mean()
        se[ell] = jackknife_se(per_traj)
    return lags, est, se


def fit_decay_rate(acf, window=None, n_points: int = 64):
    """Least-squares slope of log R(t) on a window.

    `acf` is either an AcfEvaluator (window defaults to [5, 15]/nominal_rate,
    sampled at n_points) or a (lags, values) table (window selects rows).
    Returns (lambda_hat, intercept, residual_rms)."""
    if isinstance(acf, AcfEvaluator):
        if window is None:
            window = (5.0 / acf.nominal_rate, 15.0 / acf.nominal_rate)
        t = np.linspace(window[0], window[1], n_points)
        r = acf.values(t)
    else:
        t, r = (np.asarray(a, dtype=float) for a in acf)
        if window is None:
            raise DomainError("tabulated fits need an explicit window")
        sel = (t >= window[0]) & (t <= window[1])
        t, r = t[sel], r[sel]
        if t.size < 2:
            raise DomainError("window selects fewer than 2 table rows")
    if np.any(r <= 0.0):
        first = float(t[np.argmax(r <= 0.0)])
        raise DomainError(
            f"R(t) is not positive on the window (first crossing at t={first:g})")
    logr = np.log(r)
    slope, intercept = np.polyfit(t, logr, 1)
    resid = logr - (slope * t + intercept)
    return -float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2)))


def mixing_tail(acf: AcfEvaluator, h: float) -> float:
    """Numerical int_{|t| >= h} |R(t)| dt, with the analytic exponential tail
    added beyond the point where |R| drops under the numerical floor."""
    if h <= 0.0:
        raise DomainError("tail lag h must be positive")
    rate = acf.nominal_rate
    r_h = abs(acf(h))
    if r_h < ACF_FLOOR:
        return 2.0 * r_h / rate
    # march to the truncation point |R| < floor
    t_cut = h + max(np.log(r_h / ACF_FLOOR), 1.0) / rate
    while abs(acf(t_cut)) > ACF_FLOOR:
        t_cut += 5.0 / rate
    body, _ = scipy.integrate.quad(lambda t: abs(acf(t)), h, t_cut, limit=400)
    tail = abs(acf(t_cut)) / rate
    return 2.0 * (body + tail)


def write_acf_table(path, lags, estimates, standard_errors, closed_form):
    """ACF table as CSV with columns lag,estimate,se,closed_form."""
    from .io import write_table_csv

    write_table_csv(path, ["lag", "estimate", "se", "closed_form"],
                    [lags, estimates, standard_errors, closed_form])


def sample_stationary_ensemble(acf: AcfEvaluator, du: float, n: int, M: int,
                               master_seed: int, *, threads=None) -> PathEnsemble:
    """Exactly sample M stationary paths on the uniform latent grid
    {0, du, ..., (n-1) du} from the closed-form autocovariance."""
    u = np.arange(n) * du
    grid = TimeGrid(u, GridKind.UNIFORM)
    K = stationary_covariance_matrix(acf, grid)
    factor = factorize(K)
    return sample_ensemble(factor, M, master_seed, grid=grid, model=None,
                           threads=threads)


def _truncation_point(acf: AcfEvaluator, start: float = 0.0) -> float:
    rate = acf.nominal_rate
    r0 = abs(acf(start))
    if r0 < ACF_FLOOR:
        return start
    t = start + max(np.log(r0 / ACF_FLOOR), 1.0) / rate
    while abs(acf(t)) > ACF_FLOOR:
        t += 5.0 / rate
    return t


def moment_tolerance(acf: AcfEvaluator, k: int, T: float,
                     nsigma: float = 4.0) -> float:
    """Monte Carlo tolerance for the time average of X^k over [0, T].

    Uses the Gaussian moment-covariance identities to integrate the
    autocovariance of X^k, then nsigma * sqrt(2 * integral / T)."""
    sigma2 = acf(0.0)
    if k == 1:
        cfun = lambda r: np.abs(r)
    elif k == 2:
        cfun = lambda r: 2.0 * r * r
    elif k == 3:
        cfun = lambda r: np.abs(6.0 * r**3 + 9.0 * r * sigma2**2)
    elif k == 4:
        cfun = lambda r: 24.0 * r**4 + 72.0 * r**2 * sigma2**2
    else:
        raise DomainError("moment tolerance supports k in {1,2,3,4}")
    t_cut = _truncation_point(acf)
    integral, _ = scipy.integrate.quad(lambda t: cfun(acf(t)), 0.0, t_cut,
                                       limit=400)
    return nsigma * float(np.sqrt(2.0 * integral / T))


@dataclass
class ErgodicReport:
    """Targets versus estimates for the ergodic reconstruction protocol."""

    family: str
    params: dict
    time_avg_moments: dict      # k -> {"estimate","target","tolerance"}
    ecf: list                   # rows {"k","empirical":[re,im],"theoretical"}
    fitted_rate: dict           # {"lambda_hat","window","residual","nominal"}
    mixing_tail: list           # rows {"h","tail","bound"}

    def to_dict(self) -> dict:
        return asdict(self)


def build_ergodic_report(family: str, params: HurstParams, *, T: float,
                         du: float, M: int, master_seed: int, k_grid,
                         moments=(1, 2, 4), threads=None):
    """Reproduce the long-trajectory ergodic protocol at desk scale.

    Samples M exact stationary trajectories of the requested Lamperti image
    (time-averaged moments come from trajectory 0, the empirical
    characteristic function is averaged over the whole ensemble), and
    evaluates the decay rate and mixing tails from the closed form."""
    if family not in ("sub", "bi"):
        raise DomainError(f"family must be 'sub' or 'bi', got {family!r}")
    acf = lamperti_acf(family + "_lamperti", params)
    sigma2 = acf(0.0)
    n = int(round(T / du)) + 1
    ens = sample_stationary_ensemble(acf, du, n, M, master_seed,
                                     threads=threads)
    grid = ens.grid
    path0 = ens.paths[0]

    moment_rows = {}
    for k in moments:
        est = time_average(grid, path0, lambda x: x**k)
        if k % 2 == 1:
            target = 0.0
        elif k == 2:
            target = sigma2
        elif k == 4:
            target = 3.0 * sigma2**2
        else:
            raise DomainError("even moments supported up to k = 4")
        moment_rows[str(k)] = {
            "estimate": float(est),
            "target": float(target),
            "tolerance": moment_tolerance(acf, k, T),
        }

    k_grid = np.asarray(k_grid, dtype=float)
    ecf_sum = np.zeros(k_grid.size, dtype=complex)
    for m in range(ens.n_paths):
        ecf_sum += empirical_cf(grid, ens.paths[m], k_grid)
    ecf_mean = ecf_sum / ens.n_paths
    theoretical = np.exp(-0.5 * k_grid**2 * sigma2)
    ecf_rows = [{"k": float(k), "empirical": [float(z.real), float(z.imag)],
                 "theoretical": float(th)}
                for k, z, th in zip(k_grid, ecf_mean, theoretical)]

    window = (5.0 / acf.nominal_rate, 15.0 / acf.nominal_rate)
    lam_hat, _, resid = fit_decay_rate(acf, window)
    rate_row = {"lambda_hat": float(lam_hat), "window": list(window),
                "residual": float(resid), "nominal": float(acf.nominal_rate)}

    hs = [3.0 / acf.nominal_rate * j for j in (1, 2, 3, 4)]
    tails = [mixing_tail(acf, h) for h in hs]
    # smallest constant C with tail(h) <= C e^{-rate h} over the probed lags
    c_anchor = max(tv * np.exp(acf.nominal_rate * h)
                   for h, tv in zip(hs, tails))
    tail_rows = [{"h": float(h), "tail": float(tv),
                  "bound": float(c_anchor * np.exp(-acf.nominal_rate * h))}
                 for h, tv in zip(hs, tails)]

    report = ErgodicReport(
        family=family,
        params={"H": params.H, "K": params.K, "alpha": params.alpha},
        time_avg_moments=moment_rows,
        ecf=ecf_rows,
        fitted_rate=rate_row,
        mixing_tail=tail_rows,
    )
    return report
