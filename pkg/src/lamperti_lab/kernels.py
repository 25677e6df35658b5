"""Closed-form covariance kernels and stationary autocovariances.

Scalar reference implementations live here; they are pure functions of their
arguments and are written to stay accurate over the full admissible range:

* ``sub_fbm_cov`` / ``bi_fbm_cov`` factor out the larger time so that widely
  separated pairs (geometric grids) do not lose precision to cancellation.
* The stationary autocovariances switch from the direct formula to an exact
  even binomial series once the exponential arguments make the direct form
  cancellation-bound, and they never overflow: large lags decay through
  negative exponents only.

Vectorised variants (suffix ``_vals``) serve matrix assembly and tabulation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "HurstParams",
    "AcfFamily",
    "AcfEvaluator",
    "sub_fbm_cov",
    "bi_fbm_cov",
    "acf_sub_lamperti",
    "acf_bi_lamperti",
    "acf_sub_lamperti_vals",
    "acf_bi_lamperti_vals",
    "asymp_sub_two_term",
    "mixing_rate_sub",
    "mixing_rate_bi",
    "lamperti_acf",
]

# Direct evaluation of the stationary forms is used below this value of
# alpha*|t|; beyond it the even binomial series is both cheaper and exact.
_SERIES_SWITCH = 0.7


@dataclass(frozen=True)
class HurstParams:
    """Admissible parameter triple (H, K, alpha).

    K defaults to 1, which is the sub-fractional / fBm case; alpha is the
    time-change exponent of the scaled process.
    """

    H: float
    K: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.H < 1.0):
            raise DomainError(f"H must lie in (0,1), got {self.H}")
        if not (0.0 < self.K <= 1.0):
            raise DomainError(f"K must lie in (0,1], got {self.K}")
        if not (self.alpha > 0.0):
            raise DomainError(f"alpha must be positive, got {self.alpha}")

    @property
    def h_eff(self) -> float:
        """Self-similarity index of the driver: H, or H*K for the bi family."""
        return self.H * self.K

    @property
    def hk_exp(self) -> float:
        """Effective exponent alpha*H*K of the scaled process."""
        return self.alpha * self.H * self.K


def _require_sub(p: HurstParams):
    if p.K != 1.0:
        raise DomainError("sub-fractional calls require K == 1")


def _even_binom_coefs(two_h: float, r2_max: float, tol: float = 1e-18):
    """Coefficients C(2H, 2j), j >= 1, enough terms for remainder < tol
    at squared ratio r2_max < 1."""
    coefs = []
    c = 1.0
    j = 0
    bound = 1.0
    while True:
        j += 1
        c *= (two_h - 2*j + 2.0) * (two_h - 2*j + 1.0) / ((2*j - 1.0) * (2*j))
        coefs.append(c)
        bound *= r2_max
        if abs(c) * bound < tol or j >= 80:
            return coefs


def sub_fbm_cov(s: float, t: float, H: float) -> float:
    """Covariance of sub-fractional Brownian motion at times (s, t)."""
    if not (0.0 < H < 1.0):
        raise DomainError(f"H must lie in (0,1), got {H}")
    if s < 0.0 or t < 0.0:
        raise DomainError("times must be non-negative")
    if s == 0.0 or t == 0.0:
        return 0.0
    a, b = (s, t) if s >= t else (t, s)
    r = b / a
    two_h = 2.0 * H
    if r >= 0.5:
        bracket = r**two_h - ((1.0 + r)**two_h + (1.0 - r)**two_h - 2.0) / 2.0
    else:
        # (1+r)^2H + (1-r)^2H - 2 as an even series: no cancellation at small r
        d = 0.0
        r2 = r * r
        p = 1.0
        for c in _even_binom_coefs(two_h, r2):
            p *= r2
            d += c * p
        bracket = r**two_h - d
    return a**two_h * bracket


def bi_fbm_cov(s: float, t: float, H: float, K: float) -> float:
    """Covariance of bi-fractional Brownian motion at times (s, t)."""
    if not (0.0 < H < 1.0):
        raise DomainError(f"H must lie in (0,1), got {H}")
    if not (0.0 < K <= 1.0):
        raise DomainError(f"K must lie in (0,1], got {K}")
    if s < 0.0 or t < 0.0:
        raise DomainError("times must be non-negative")
    if s == 0.0 or t == 0.0:
        return 0.0
    a, b = (s, t) if s >= t else (t, s)
    hk2 = 2.0 * H * K
    if s == t:
        return a**hk2
    r = b / a
    delta = math.expm1(K * math.log1p(r**(2.0 * H))) - math.expm1(hk2 * math.log1p(-r))
    return 2.0**-K * a**hk2 * delta


def acf_sub_lamperti(t: float, p: HurstParams) -> float:
    """Stationary autocovariance of the Lamperti image of scaled sub-fBm."""
    _require_sub(p)
    H, alpha = p.H, p.alpha
    at = alpha * abs(t)
    two_h = 2.0 * H
    if at == 0.0:
        return 2.0 - 2.0**(two_h - 1.0)
    if at <= _SERIES_SWITCH:
        x = math.exp(at)
        return math.exp(-H * at) * (
            math.exp(two_h * at) + 1.0
            - 0.5 * ((x + 1.0)**two_h + (x - 1.0)**two_h))
    # exact tail: e^{-H a|t|} - sum_j C(2H,2j) e^{(H-2j) a|t|}
    acc = math.exp(-H * at)
    q2 = math.exp(-2.0 * at)
    for j, c in enumerate(_even_binom_coefs(two_h, q2), start=1):
        acc -= c * math.exp((H - 2.0 * j) * at)
    return acc


def acf_bi_lamperti(t: float, p: HurstParams) -> float:
    """Stationary autocovariance of the Lamperti image of scaled bi-fBm."""
    H, K, alpha = p.H, p.K, p.alpha
    at = alpha * abs(t)
    hk = H * K
    if at == 0.0:
        return 1.0
    if at <= _SERIES_SWITCH:
        x = math.exp(at)
        return 2.0**-K * math.exp(-hk * at) * (
            (math.exp(2.0 * H * at) + 1.0)**K - (x - 1.0)**(2.0 * hk))
    q = math.exp(-at)
    pw = math.exp(-2.0 * H * at)
    delta = math.expm1(K * math.log1p(pw)) - math.expm1(2.0 * hk * math.log1p(-q))
    if delta <= 0.0:
        return 0.0
    return 2.0**-K * math.exp(hk * at + math.log(delta))


def asymp_sub_two_term(t: float, p: HurstParams) -> float:
    """Two-term large-lag expansion of the sub-Lamperti autocovariance."""
    _require_sub(p)
    H, alpha = p.H, p.alpha
    return math.exp(-alpha * H * t) - H * (2.0 * H - 1.0) * math.exp(-(2.0 - H) * alpha * t)


def mixing_rate_sub(p: HurstParams) -> float:
    """Exponential mixing rate of the sub-Lamperti process."""
    _require_sub(p)
    return p.alpha * p.H


def mixing_rate_bi(p: HurstParams) -> float:
    """Exponential mixing rate of the bi-Lamperti process."""
    hk = p.H * p.K
    return p.alpha * min(2.0 * p.H - hk, 1.0 - hk)


# ---------------------------------------------------------------------------
# vectorised forms
# ---------------------------------------------------------------------------

def acf_sub_lamperti_vals(t, H: float, alpha: float) -> np.ndarray:
    """Vectorised sub-Lamperti autocovariance over an array of lags."""
    t = np.abs(np.asarray(t, dtype=float))
    at = alpha * t
    two_h = 2.0 * H
    out = np.empty_like(at)
    small = at <= _SERIES_SWITCH
    if small.any():
        a_s = at[small]
        x = np.exp(a_s)
        out[small] = np.exp(-H * a_s) * (
            np.exp(two_h * a_s) + 1.0 - 0.5 * ((x + 1.0)**two_h + (x - 1.0)**two_h))
    if (~small).any():
        a_l = at[~small]
        acc = np.exp(-H * a_l)
        for j, c in enumerate(_even_binom_coefs(two_h, float(np.exp(-2.0 * a_l.min()))),
                              start=1):
            acc -= c * np.exp((H - 2.0 * j) * a_l)
        out[~small] = acc
    zero = at == 0.0
    if zero.any():
        out[zero] = 2.0 - 2.0**(two_h - 1.0)
    return out


def acf_bi_lamperti_vals(t, H: float, K: float, alpha: float) -> np.ndarray:
    """Vectorised bi-Lamperti autocovariance over an array of lags."""
    t = np.abs(np.asarray(t, dtype=float))
    at = alpha * t
    hk = H * K
    out = np.empty_like(at)
    small = at <= _SERIES_SWITCH
    if small.any():
        a_s = at[small]
        x = np.exp(a_s)
        out[small] = 2.0**-K * np.exp(-hk * a_s) * (
            (np.exp(2.0 * H * a_s) + 1.0)**K - (x - 1.0)**(2.0 * hk))
    if (~small).any():
        a_l = at[~small]
        delta = (np.expm1(K * np.log1p(np.exp(-2.0 * H * a_l)))
                 - np.expm1(2.0 * hk * np.log1p(-np.exp(-a_l))))
        vals = np.zeros_like(a_l)
        pos = delta > 0.0
        vals[pos] = 2.0**-K * np.exp(hk * a_l[pos] + np.log(delta[pos]))
        out[~small] = vals
    zero = at == 0.0
    if zero.any():
        out[zero] = 1.0
    return out


# ---------------------------------------------------------------------------
# evaluator objects
# ---------------------------------------------------------------------------

class AcfFamily(enum.Enum):
    SUB_LAMPERTI = "sub_lamperti"
    BI_LAMPERTI = "bi_lamperti"
    LANGEVIN_SUB_LAMPERTI = "langevin_sub_lamperti"
    LANGEVIN_BI_LAMPERTI = "langevin_bi_lamperti"


@dataclass(frozen=True)
class AcfEvaluator:
    """A stationary autocovariance with its guaranteed decay rate."""

    family: AcfFamily
    params: HurstParams
    nominal_rate: float
    _scalar: callable = field(repr=False)
    _vector: callable = field(repr=False)

    def __call__(self, t: float) -> float:
        return self._scalar(t)

    def values(self, lags) -> np.ndarray:
        return self._vector(lags)


def lamperti_acf(family, params: HurstParams) -> AcfEvaluator:
    """Closed-form evaluator for the sub- or bi-Lamperti autocovariance."""
    family = AcfFamily(family) if not isinstance(family, AcfFamily) else family
    if family is AcfFamily.SUB_LAMPERTI:
        _require_sub(params)
        return AcfEvaluator(
            family=family,
            params=params,
            nominal_rate=mixing_rate_sub(params),
            _scalar=lambda t: acf_sub_lamperti(t, params),
            _vector=lambda lags: acf_sub_lamperti_vals(lags, params.H, params.alpha),
        )
    if family is AcfFamily.BI_LAMPERTI:
        return AcfEvaluator(
            family=family,
            params=params,
            nominal_rate=mixing_rate_bi(params),
            _scalar=lambda t: acf_bi_lamperti(t, params),
            _vector=lambda lags: acf_bi_lamperti_vals(
                lags, params.H, params.K, params.alpha),
        )
    raise DomainError(f"no closed-form autocovariance for family {family}")
