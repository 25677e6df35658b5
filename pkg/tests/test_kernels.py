"""Kernel closed forms: frozen reference values, symmetry, reductions,
asymptotics, mixing rates, and positive semidefiniteness.

Frozen constants were computed with 40-digit mpmath evaluations of the same
closed forms (independent of the float implementation under test).
"""

import math

import numpy as np
import pytest

from lamperti_lab import (HurstParams, acf_bi_lamperti, acf_sub_lamperti,
                          asymp_sub_two_term, bi_fbm_cov, lamperti_acf,
                          mixing_rate_bi, mixing_rate_sub, sub_fbm_cov)
from lamperti_lab.errors import DomainError
from lamperti_lab.kernels import acf_bi_lamperti_vals, acf_sub_lamperti_vals

RNG = np.random.default_rng(1234)


class TestSubFbmCov:
    def test_brownian_case(self):
        assert sub_fbm_cov(1.0, 2.0, 0.5) == pytest.approx(1.0, abs=1e-14)

    def test_zero_time(self):
        assert sub_fbm_cov(0.0, 5.0, 0.3) == 0.0

    def test_unit_variance_frozen(self):
        # 2 - 2^{0.4}, mpmath 40 digits
        assert sub_fbm_cov(1.0, 1.0, 0.7) == pytest.approx(
            0.68049208922710574063, rel=1e-13)

    def test_symmetry_exact(self):
        for _ in range(10_000):
            s, t = RNG.uniform(0.0, 10.0, 2)
            H = RNG.uniform(0.05, 0.95)
            assert sub_fbm_cov(s, t, H) == sub_fbm_cov(t, s, H)

    def test_brownian_reduction_random(self):
        for _ in range(100):
            s, t = RNG.uniform(0.0, 10.0, 2)
            assert sub_fbm_cov(s, t, 0.5) == pytest.approx(min(s, t), abs=1e-12)

    def test_separated_pair_matches_highprec(self):
        # distant-pair regime exercising the series branch: reference from
        # a 40-digit evaluation of the raw formula
        got = sub_fbm_cov(1.0, 1e8, 0.6)
        # s^{2H}+t^{2H}-((s+t)^{2H}+(t-s)^{2H})/2 at (1, 1e8), H=0.6
        assert got == pytest.approx(0.99999995222713953358, rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            sub_fbm_cov(1.0, 1.0, 0.0)
        with pytest.raises(DomainError):
            sub_fbm_cov(-1.0, 1.0, 0.5)


class TestBiFbmCov:
    def test_unit_time_is_one(self):
        for H in (0.2, 0.5, 0.9):
            for K in (0.3, 0.6, 1.0):
                assert bi_fbm_cov(1.0, 1.0, H, K) == pytest.approx(1.0, abs=1e-14)

    def test_brownian_case(self):
        assert bi_fbm_cov(1.0, 2.0, 0.5, 1.0) == pytest.approx(1.0, abs=1e-14)

    def test_frozen_value(self):
        # mpmath 40 digits
        assert bi_fbm_cov(1.0, 2.0, 0.7, 0.6) == pytest.approx(
            0.77234282668507357835, rel=1e-13)

    def test_fbm_reduction_at_k1(self):
        for _ in range(100):
            s, t = RNG.uniform(0.0, 10.0, 2)
            H = RNG.uniform(0.05, 0.95)
            fbm = 0.5 * (s**(2*H) + t**(2*H) - abs(t - s)**(2*H))
            assert bi_fbm_cov(s, t, H, 1.0) == pytest.approx(fbm, abs=1e-12)

    def test_symmetry_exact(self):
        for _ in range(10_000):
            s, t = RNG.uniform(0.0, 10.0, 2)
            H, K = RNG.uniform(0.05, 0.95), RNG.uniform(0.05, 1.0)
            assert bi_fbm_cov(s, t, H, K) == bi_fbm_cov(t, s, H, K)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            bi_fbm_cov(1.0, 1.0, 0.5, 1.5)
        with pytest.raises(DomainError):
            bi_fbm_cov(1.0, -2.0, 0.5, 0.5)


class TestAcfSubLamperti:
    def test_lag_zero_anchor(self):
        for _ in range(20):
            H = RNG.uniform(0.05, 0.95)
            alpha = RNG.uniform(0.2, 5.0)
            p = HurstParams(H=H, alpha=alpha)
            assert acf_sub_lamperti(0.0, p) == pytest.approx(
                2.0 - 2.0**(2*H - 1.0), abs=1e-12)

    def test_half_hurst_is_exponential(self):
        p = HurstParams(H=0.5, alpha=1.0)
        assert acf_sub_lamperti(math.log(4.0), p) == pytest.approx(0.5, rel=1e-13)
        for t in (0.1, 0.9, 3.0, 17.0):
            assert acf_sub_lamperti(t, p) == pytest.approx(
                math.exp(-t / 2.0), rel=1e-12)

    def test_frozen_values(self):
        # mpmath 40 digits
        assert acf_sub_lamperti(1.0, HurstParams(H=0.7, alpha=1.5)) == \
            pytest.approx(0.30993981795848719241, rel=1e-13)
        assert acf_sub_lamperti(0.35, HurstParams(H=0.62, alpha=2.0)) == \
            pytest.approx(0.58957033555404074986, rel=1e-13)

    def test_evenness_exact(self):
        p = HurstParams(H=0.73, alpha=2.1)
        for t in RNG.uniform(0.01, 30.0, 50):
            assert acf_sub_lamperti(t, p) == acf_sub_lamperti(-t, p)

    def test_consistency_with_covariance_at_zero(self):
        for _ in range(20):
            H = RNG.uniform(0.05, 0.95)
            p = HurstParams(H=H, alpha=RNG.uniform(0.5, 4.0))
            assert acf_sub_lamperti(0.0, p) == pytest.approx(
                sub_fbm_cov(1.0, 1.0, H), abs=1e-12)

    def test_finite_up_to_huge_lags(self):
        p = HurstParams(H=0.9, alpha=1.0)
        for at in (10.0, 100.0, 700.0, 1500.0):
            v = acf_sub_lamperti(at, p)
            assert math.isfinite(v) and v >= 0.0

    def test_bounded_by_lag_zero(self):
        for _ in range(20):
            p = HurstParams(H=RNG.uniform(0.05, 0.95),
                            alpha=RNG.uniform(0.3, 4.0))
            r0 = acf_sub_lamperti(0.0, p)
            for t in RNG.uniform(0.0, 40.0, 40):
                assert abs(acf_sub_lamperti(t, p)) <= r0 * (1 + 1e-12)

    def test_vectorised_matches_scalar(self):
        p = HurstParams(H=0.66, alpha=2.3)
        lags = np.concatenate([np.linspace(0.0, 1.0, 7),
                               np.linspace(1.0, 40.0, 11)])
        vals = acf_sub_lamperti_vals(lags, p.H, p.alpha)
        for t, v in zip(lags, vals):
            assert v == pytest.approx(acf_sub_lamperti(t, p), rel=1e-14, abs=1e-300)


class TestAcfBiLamperti:
    def test_lag_zero_is_one(self):
        for _ in range(20):
            p = HurstParams(H=RNG.uniform(0.05, 0.95), K=RNG.uniform(0.05, 1.0),
                            alpha=RNG.uniform(0.2, 5.0))
            assert acf_bi_lamperti(0.0, p) == pytest.approx(1.0, abs=1e-12)

    def test_brownian_reduction(self):
        p = HurstParams(H=0.5, K=1.0, alpha=1.0)
        assert acf_bi_lamperti(1.0, p) == pytest.approx(
            0.6065306597126334236, rel=1e-13)

    def test_frozen_values(self):
        # mpmath 40 digits
        assert acf_bi_lamperti(1.0, HurstParams(H=0.7, K=0.6, alpha=1.5)) == \
            pytest.approx(0.3256387037547767596, rel=1e-13)
        assert acf_bi_lamperti(0.4, HurstParams(H=0.8, K=0.75, alpha=2.0)) == \
            pytest.approx(0.68540460407327663614, rel=1e-13)

    def test_evenness_exact(self):
        p = HurstParams(H=0.81, K=0.64, alpha=1.7)
        for t in RNG.uniform(0.01, 30.0, 50):
            assert acf_bi_lamperti(t, p) == acf_bi_lamperti(-t, p)

    def test_consistency_with_covariance_at_zero(self):
        for _ in range(20):
            H, K = RNG.uniform(0.05, 0.95), RNG.uniform(0.05, 1.0)
            p = HurstParams(H=H, K=K, alpha=RNG.uniform(0.5, 4.0))
            assert acf_bi_lamperti(0.0, p) == pytest.approx(
                bi_fbm_cov(1.0, 1.0, H, K), abs=1e-12)

    def test_finite_up_to_huge_lags(self):
        p = HurstParams(H=0.9, K=0.8, alpha=1.0)
        for at in (10.0, 100.0, 700.0, 1500.0):
            v = acf_bi_lamperti(at, p)
            assert math.isfinite(v) and v >= 0.0

    def test_vectorised_matches_scalar(self):
        p = HurstParams(H=0.74, K=0.58, alpha=1.9)
        lags = np.concatenate([np.linspace(0.0, 1.0, 7),
                               np.linspace(1.0, 40.0, 11)])
        vals = acf_bi_lamperti_vals(lags, p.H, p.K, p.alpha)
        for t, v in zip(lags, vals):
            assert v == pytest.approx(acf_bi_lamperti(t, p), rel=1e-14, abs=1e-300)


class TestAsymptotics:
    def test_two_term_frozen(self):
        p = HurstParams(H=0.6, alpha=3.0)
        assert asymp_sub_two_term(3.0, p) == pytest.approx(
            0.0045161763007845712797, rel=1e-13)

    def test_half_hurst_single_term(self):
        p = HurstParams(H=0.5, alpha=2.0)
        for t in (0.5, 2.0, 7.0):
            assert asymp_sub_two_term(t, p) == pytest.approx(
                math.exp(-t), rel=1e-14)

    def test_vanishes_at_infinity(self):
        p = HurstParams(H=0.8, alpha=1.5)
        assert asymp_sub_two_term(300.0, p) < 1e-100

    @pytest.mark.parametrize("H", [0.3, 0.6, 0.8])
    @pytest.mark.parametrize("alpha", [1.0, 1.5, 3.0])
    def test_residual_converges_to_coefficient(self, H, alpha):
        p = HurstParams(H=H, alpha=alpha)
        target = -H * (2.0 * H - 1.0)
        t = 20.0 / alpha
        resid = (acf_sub_lamperti(t, p) - math.exp(-alpha * H * t)) \
            * math.exp((2.0 - H) * alpha * t)
        if H == 0.5:
            assert abs(resid) < 1e-10
        else:
            assert resid == pytest.approx(target, rel=0.01)


class TestMixingRates:
    def test_sub_values(self):
        assert mixing_rate_sub(HurstParams(H=0.6, alpha=3.0)) == pytest.approx(1.8)
        assert mixing_rate_sub(HurstParams(H=0.5, alpha=1.0)) == pytest.approx(0.5)
        assert mixing_rate_sub(HurstParams(H=1e-3, alpha=1.0)) < 2e-3

    def test_bi_values(self):
        assert mixing_rate_bi(HurstParams(H=0.7, K=0.6, alpha=1.5)) == \
            pytest.approx(0.87, rel=1e-12)
        assert mixing_rate_bi(HurstParams(H=0.5, K=1.0, alpha=1.0)) == \
            pytest.approx(0.5)

    def test_bi_reduction_at_k1(self):
        for H in (0.2, 0.4, 0.6, 0.9):
            p = HurstParams(H=H, K=1.0, alpha=1.7)
            assert mixing_rate_bi(p) == pytest.approx(1.7 * min(H, 1.0 - H))

    def test_positive_on_domain(self):
        for _ in range(50):
            p = HurstParams(H=RNG.uniform(0.05, 0.95), K=RNG.uniform(0.05, 1.0),
                            alpha=RNG.uniform(0.1, 5.0))
            assert mixing_rate_bi(p) > 0.0

    def test_rate_dominance_sweep(self):
        # |R_B(t)| e^{rate t} stays bounded on t in [0, 50/rate]
        for H in (0.55, 0.7, 0.85):
            for K in (0.4, 0.7, 1.0):
                for alpha in (0.8, 1.5, 3.0):
                    p = HurstParams(H=H, K=K, alpha=alpha)
                    rate = mixing_rate_bi(p)
                    t = np.linspace(0.0, 50.0 / rate, 200)
                    vals = np.abs(acf_bi_lamperti_vals(t, H, K, alpha))
                    assert np.max(vals * np.exp(rate * t)) < 3.0


class TestPositiveSemidefiniteness:
    @pytest.mark.parametrize("family", ["sub", "bi"])
    def test_random_gram_matrices(self, family):
        for trial in range(8):
            n = int(RNG.integers(8, 65))
            t = np.sort(RNG.uniform(0.01, 8.0, n))
            H = RNG.uniform(0.1, 0.9)
            K = RNG.uniform(0.2, 1.0)
            if family == "sub":
                G = np.array([[sub_fbm_cov(a, b, H) for b in t] for a in t])
            else:
                G = np.array([[bi_fbm_cov(a, b, H, K) for b in t] for a in t])
            w = np.linalg.eigvalsh(G)
            assert w.min() >= -1e-10 * np.trace(G)


class TestEvaluator:
    def test_sub_evaluator(self):
        p = HurstParams(H=0.6, alpha=3.0)
        ev = lamperti_acf("sub_lamperti", p)
        assert ev.nominal_rate == pytest.approx(1.8)
        assert ev(0.0) == pytest.approx(2.0 - 2.0**0.2, abs=1e-12)
        assert ev(-2.0) == ev(2.0)
        np.testing.assert_allclose(ev.values([0.0, 1.0]),
                                   [ev(0.0), ev(1.0)], rtol=1e-14)

    def test_bi_evaluator(self):
        p = HurstParams(H=0.7, K=0.6, alpha=1.5)
        ev = lamperti_acf("bi_lamperti", p)
        assert ev.nominal_rate == pytest.approx(0.87)
        assert ev(0.0) == pytest.approx(1.0, abs=1e-12)

    def test_cauchy_schwarz_bound(self):
        for fam, p in (("sub_lamperti", HurstParams(H=0.8, alpha=2.0)),
                       ("bi_lamperti", HurstParams(H=0.8, K=0.5, alpha=2.0))):
            ev = lamperti_acf(fam, p)
            r0 = ev(0.0)
            for t in RNG.uniform(0.0, 30.0, 100):
                assert abs(ev(t)) <= r0 * (1 + 1e-12)
