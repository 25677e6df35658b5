"""Langevin-type scaled processes driven by sub- or bi-fractional noise.

Covariances are double integrals of a power-law weight against the mixed
second derivative of the driver covariance.  The kernels are weakly singular
along the diagonal, so evaluation goes through the graded meshes of
`quadmesh`, with two refinement levels compared for an error estimate.
Pathwise sampling discretises the defining stochastic integral with midpoint
kernel evaluation against exactly simulated driver increments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import backend
from .errors import (DomainError, GridError, QuadratureError,
                     SingularPointError, UnsupportedRegimeError)
from .kernels import HurstParams
from .quadmesh import RegionMesh
from .sampler import PathEnsemble, Family

__all__ = [
    "LangevinSpec",
    "QuadratureConfig",
    "mixed_deriv_sub",
    "mixed_deriv_bi",
    "langevin_cov",
    "langevin_lt_cov",
    "tabulate_lt_acf",
    "sample_langevin_path",
]

_BASE_J_OUT = 24


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-6
    max_subdivisions: int = 4
    diagonal_split: bool = True

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-2):
            raise DomainError(f"rel_tol must lie in (0, 1e-2], got {self.rel_tol}")
        if self.max_subdivisions < 2:
            raise DomainError("need at least two refinement levels")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class LangevinSpec:
    """Kernel exponent and normalisation for a Langevin-type scaled process.

    The pathwise integral construction needs a Hoelder exponent above 1/2,
    so the sub family requires H > 1/2 and the bi family H*K > 1/2.
    """

    params: HurstParams
    family: str = "sub"  # "sub" | "bi"
    c_norm: float = 1.0

    def __post_init__(self):
        if self.family not in ("sub", "bi"):
            raise DomainError(f"family must be 'sub' or 'bi', got {self.family!r}")
        if self.family == "sub" and self.params.K != 1.0:
            raise DomainError("sub family requires K == 1")
        if self.c_norm <= 0.0:
            raise DomainError("c_norm must be positive")
        h = self.h_eff
        if h <= 0.5:
            raise UnsupportedRegimeError(
                f"pathwise integrals need h_eff > 1/2, got {h:.4g} "
                "(Skorokhod-sense integrals are out of scope)")
        if self.params.alpha * h <= 0.5:
            raise UnsupportedRegimeError(
                f"covariance quadrature needs alpha*h_eff > 1/2, got "
                f"{self.params.alpha * h:.4g}")

    @property
    def h_eff(self) -> float:
        return self.params.H * self.params.K

    @property
    def beta(self) -> float:
        """Power-law kernel exponent preserving self-similarity."""
        return self.h_eff * (self.params.alpha - 1.0)


def mixed_deriv_sub(x: float, y: float, H: float) -> float:
    """Mixed second derivative of the sub-fBm covariance, off the diagonal."""
    if not (0.5 < H < 1.0):
        raise UnsupportedRegimeError(f"mixed derivative needs 1/2 < H < 1, got {H}")
    if x <= 0.0 or y <= 0.0:
        raise DomainError("times must be positive")
    if x == y:
        raise SingularPointError("kernel is singular on the diagonal x == y")
    e = 2.0 * H - 2.0
    return H * (2.0 * H - 1.0) * (abs(x - y)**e - (x + y)**e)


def mixed_deriv_bi(x: float, y: float, H: float, K: float) -> float:
    """Mixed second derivative of the bi-fBm covariance, off the diagonal."""
    if not (0.0 < K <= 1.0):
        raise DomainError(f"K must lie in (0,1], got {K}")
    if not (0.0 < H < 1.0):
        raise DomainError(f"H must lie in (0,1), got {H}")
    if H * K <= 0.5:
        raise UnsupportedRegimeError(
            f"mixed derivative needs H*K > 1/2, got {H * K:.4g}")
    if x <= 0.0 or y <= 0.0:
        raise DomainError("times must be positive")
    if x == y:
        raise SingularPointError("kernel is singular on the diagonal x == y")
    hk = H * K
    t1 = 4.0 * H * H * K * (K - 1.0) * (x * y)**(2.0 * H - 1.0) \
        * (x**(2.0 * H) + y**(2.0 * H))**(K - 2.0)
    t2 = 2.0 * hk * (2.0 * hk - 1.0) * abs(x - y)**(2.0 * hk - 2.0)
    return 2.0**-K * (t1 + t2)


def _component_funcs(spec: LangevinSpec):
    H, K, beta = spec.params.H, spec.params.K, spec.beta
    if spec.family == "sub":
        return {
            "full": lambda s, y: backend.langevin_integrand_sub(s, y, H, beta, 0),
            "sing": lambda s, y: backend.langevin_integrand_sub(s, y, H, beta, 1),
            "reg": lambda s, y: backend.langevin_integrand_sub(s, y, H, beta, 2),
        }
    return {
        "full": lambda s, y: backend.langevin_integrand_bi(s, y, H, K, beta, 0),
        "sing": lambda s, y: backend.langevin_integrand_bi(s, y, H, K, beta, 1),
        "reg": lambda s, y: backend.langevin_integrand_bi(s, y, H, K, beta, 2),
    }


def _raw_integral(spec: LangevinSpec, u: float, v: float, level: int) -> float:
    sigma = 2.0 * spec.h_eff - 2.0
    funcs = _component_funcs(spec)
    J_out = _BASE_J_OUT + 4 * level
    splits = level + 1
    total = 0.0
    for a, b in ((u, v), (v, u)):
        mesh = RegionMesh(a, b, sigma, spec.beta, J_out, splits)
        total += mesh.integrate(funcs)
    return total


def langevin_cov(spec: LangevinSpec, u: float, v: float,
                 q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Cov(Ybar(u), Ybar(v)) by adaptive singular quadrature."""
    if u < 0.0 or v < 0.0:
        raise DomainError("times must be non-negative")
    if u == 0.0 or v == 0.0:
        return 0.0
    value, _ = _adaptive(spec, u, v, q)
    return spec.c_norm**2 * value


def langevin_cov_with_error(spec: LangevinSpec, u: float, v: float,
                            q: QuadratureConfig = DEFAULT_QUADRATURE):
    """Like `langevin_cov` but also returns the error estimate."""
    if u < 0.0 or v < 0.0:
        raise DomainError("times must be non-negative")
    if u == 0.0 or v == 0.0:
        return 0.0, 0.0
    value, err = _adaptive(spec, u, v, q)
    c2 = spec.c_norm**2
    return c2 * value, c2 * err


def _adaptive(spec, u, v, q):
    prev = _raw_integral(spec, u, v, 0)
    for level in range(1, q.max_subdivisions):
        cur = _raw_integral(spec, u, v, level)
        err = abs(cur - prev)
        if err <= q.rel_tol * abs(cur):
            return cur, err
        prev = cur
    raise QuadratureError(
        f"quadrature did not reach rel_tol={q.rel_tol:g} within "
        f"{q.max_subdivisions} levels (estimate {cur:.6g}, error {err:.3g})",
        estimate=cur, error_bound=err)


def langevin_lt_cov(spec: LangevinSpec, t: float, s: float,
                    q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Covariance of the Lamperti image of the Langevin-type process.

    The process has self-similarity index alpha * h_eff, so its
    stationarising transform is e^{-alpha h t} X(e^t): the exponential time
    change must match the index or shift invariance fails for alpha != 1."""
    alpha, h = spec.params.alpha, spec.h_eff
    return math.exp(-alpha * h * (t + s)) * langevin_cov(
        spec, math.exp(t), math.exp(s), q)


def tabulate_lt_acf(spec: LangevinSpec, lags,
                    q: QuadratureConfig = DEFAULT_QUADRATURE):
    """Tabulate the Lamperti-image autocovariance R(t) = Cov(t, 0) over lags.

    Returns (lags, values, error_estimates)."""
    lags = np.asarray(lags, dtype=float)
    vals = np.empty_like(lags)
    errs = np.empty_like(lags)
    alpha, h = spec.params.alpha, spec.h_eff
    for i, t in enumerate(lags):
        cov, err = langevin_cov_with_error(spec, math.exp(t), 1.0, q)
        damp = math.exp(-alpha * h * t)
        vals[i] = damp * cov
        errs[i] = damp * err
    return lags, vals, errs


def sample_langevin_path(driver: PathEnsemble, spec: LangevinSpec) -> PathEnsemble:
    """Riemann-Stieltjes discretisation of the Langevin-type integral.

    Ybar(t_j) = c * sum_{i<j} m_i^beta (D(t_{i+1}) - D(t_i)) with midpoint
    kernel evaluation m_i; the driver must be an exactly sampled sub- or
    bi-fBm ensemble on a grid starting at 0."""
    fam = driver.model.family if driver.model is not None else None
    if spec.family == "sub" and fam is not Family.SUB_FBM:
        raise GridError("sub-family spec needs a SubFbm driver ensemble")
    if spec.family == "bi" and fam is not Family.BI_FBM:
        raise GridError("bi-family spec needs a BiFbm driver ensemble")
    t = driver.grid.points
    if t[0] != 0.0:
        raise GridError("driver grid must start at t = 0")
    mids = 0.5 * (t[:-1] + t[1:])
    weights = spec.c_norm * np.power(mids, spec.beta)
    increments = np.diff(driver.paths, axis=1)
    out = np.empty_like(driver.paths)
    out[:, 0] = 0.0
    np.cumsum(weights[None, :] * increments, axis=1, out=out[:, 1:])
    return replace(driver, paths=out)
