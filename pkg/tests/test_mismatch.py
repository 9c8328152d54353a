import math

import pytest

from statrate.channels import Nakagami, Rayleigh, Rician
from statrate.mismatch import (
    chernoff_tilt,
    mean_outage_exact_rayleigh,
    mean_outage_mismatch,
    meta_prob_exact_rayleigh,
    meta_prob_mismatch,
)
from statrate.rateselect import epsn_rayleigh_ar, epsn_rayleigh_pcr


class TestMeanOutageExactRayleigh:
    def test_inverse_pair(self):
        eps_n = epsn_rayleigh_ar(1e-3, 50)
        assert mean_outage_exact_rayleigh(eps_n, 50) == pytest.approx(1e-3, abs=1e-12)
        for eps in (1e-4, 1e-2, 0.3):
            for n in (1, 7, 100, 10**4):
                got = mean_outage_exact_rayleigh(epsn_rayleigh_ar(eps, n), n)
                assert got == pytest.approx(eps, abs=1e-12)

    def test_vanishes_with_eps_n(self):
        assert mean_outage_exact_rayleigh(1e-300, 10) < 1e-290

    def test_n_equals_one(self):
        # 1 - (1 - ln(0.999))^(-1)
        got = mean_outage_exact_rayleigh(1e-3, 1)
        assert got == pytest.approx(0.000999500333167, rel=1e-10)
        assert got == pytest.approx(9.9950e-4, abs=5e-9)

    def test_domain(self):
        with pytest.raises(ValueError):
            mean_outage_exact_rayleigh(0.0, 10)
        with pytest.raises(ValueError):
            mean_outage_exact_rayleigh(1e-3, 0)


class TestMetaProbExactRayleigh:
    def test_plug_in_failure_mode(self):
        # eps_n = eps: the sample mean overshoots half the time
        for n in (10, 100, 1000):
            assert meta_prob_exact_rayleigh(1e-3, 1e-3, n) > 0.4

    def test_pcr_design_hits_xi(self):
        for eps in (1e-4, 1e-2):
            for xi in (1e-3, 0.1):
                for n in (1, 10, 300):
                    eps_n = epsn_rayleigh_pcr(eps, xi, n)
                    assert meta_prob_exact_rayleigh(eps_n, eps, n) == pytest.approx(
                        xi, abs=1e-8)

    def test_monotone_in_eps_n(self):
        # strictly increasing until the tail saturates to 1 in floating point
        levels = [1e-4, 5e-4, 1e-3, 1.5e-3, 2e-3]
        vals = [meta_prob_exact_rayleigh(e, 1e-3, 50) for e in levels]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert meta_prob_exact_rayleigh(1e-2, 1e-3, 50) >= vals[-1]

    def test_range(self):
        v = meta_prob_exact_rayleigh(0.5, 1e-3, 5)
        assert 0.0 <= v <= 1.0


class TestMeanOutageMismatch:
    def test_rayleigh_numeric_is_exact(self):
        for lam in (0.5, 1.0, 3.0):
            got = mean_outage_mismatch(Rayleigh(lam), 1e-3, 100)
            assert got == pytest.approx(mean_outage_exact_rayleigh(1e-3, 100), abs=1e-15)

    def test_nakagami_m1_matches_rayleigh(self):
        for eps_n, n in [(1e-4, 10), (1e-3, 100), (1e-2, 1000)]:
            got = mean_outage_mismatch(Nakagami(1.0, 1.0), eps_n, n)
            assert got == pytest.approx(mean_outage_exact_rayleigh(eps_n, n), abs=1e-8)

    def test_rician_k0_matches_rayleigh(self):
        for eps_n, n in [(1e-3, 10), (1e-2, 100)]:
            got = mean_outage_mismatch(Rician(1.0, 0.0), eps_n, n)
            assert got == pytest.approx(mean_outage_exact_rayleigh(eps_n, n), abs=1e-8)

    def test_weak_n_rician_k0_is_identity(self):
        assert mean_outage_mismatch(Rician(1.0, 0.0), 1e-4, 100,
                                    method="weak_n") == pytest.approx(1e-4, rel=1e-12)

    def test_weak_n_rician_k3(self):
        # (k+1) e^(-k) eps
        got = mean_outage_mismatch(Rician(1.0, 3.0), 1e-4, 100, method="weak_n")
        assert got == pytest.approx(4.0 * math.exp(-3.0) * 1e-4, rel=1e-12)
        assert got == pytest.approx(1.9915e-5, abs=5e-10)

    def test_weak_n_nakagami_half(self):
        # 0.5^0.5 / Gamma(1.5) * sqrt(eps)
        got = mean_outage_mismatch(Nakagami(1.0, 0.5), 1e-4, 100, method="weak_n")
        assert got == pytest.approx(
            math.sqrt(0.5) / math.gamma(1.5) * math.sqrt(1e-4), rel=1e-12)
        assert got == pytest.approx(7.979e-3, abs=5e-7)

    def test_weak_n_scale_free(self):
        for lam in (0.1, 1.0, 10.0):
            got = mean_outage_mismatch(Rician(lam, 3.0), 1e-4, 100, method="weak_n")
            assert got == pytest.approx(4.0 * math.exp(-3.0) * 1e-4, rel=1e-10)

    def test_pessimism_optimism_signs(self):
        # Rayleigh-designed rate on Rician: conservative; on Nakagami m<1: optimistic
        n = 10**3
        eps = 1e-4
        eps_n = epsn_rayleigh_ar(eps, n)
        for k in (1.0, 3.0, 7.0):
            assert mean_outage_mismatch(Rician(1.0, k), eps_n, n) < eps
        for m in (0.5, 0.7, 0.9):
            assert mean_outage_mismatch(Nakagami(1.0, m), eps_n, n) > eps

    def test_power_law_approximation_fidelity(self):
        # second-order expansion within 10% of the quadrature value
        eps = 1e-4
        models = [Rician(1.0, 0.0), Rician(1.0, 1.0), Rician(1.0, 3.0), Rician(1.0, 7.0),
                  Nakagami(1.0, 0.5), Nakagami(1.0, 1.0), Nakagami(1.0, 2.0),
                  Nakagami(1.0, 3.0)]
        for n in (10**3, 10**4):
            eps_n = epsn_rayleigh_ar(eps, n)
            for model in models:
                numeric = mean_outage_mismatch(model, eps_n, n)
                approx = mean_outage_mismatch(model, eps_n, n, method="power_law")
                assert abs(approx - numeric) / numeric <= 0.10

    def test_weak_n_independence_of_n(self):
        # numeric values at AR design levels barely move between n=1e2 and 1e4
        eps = 1e-4
        models = [Rician(1.0, 1.0), Rician(1.0, 3.0), Rician(1.0, 7.0),
                  Nakagami(1.0, 0.5), Nakagami(1.0, 0.7), Nakagami(1.0, 0.9)]
        for model in models:
            lo = mean_outage_mismatch(model, epsn_rayleigh_ar(eps, 10**2), 10**2)
            hi = mean_outage_mismatch(model, epsn_rayleigh_ar(eps, 10**4), 10**4)
            assert abs(lo - hi) / hi <= 0.05

    def test_method_validation(self):
        with pytest.raises(ValueError):
            mean_outage_mismatch(Rayleigh(1.0), 1e-3, 10, method="mc")

    def test_model_validation(self):
        with pytest.raises(TypeError):
            mean_outage_mismatch(object(), 1e-3, 10)


class TestMetaProbMismatch:
    def test_rayleigh_numeric_is_exact(self):
        for lam in (0.1, 1.0, 10.0):
            got = meta_prob_mismatch(Rayleigh(lam), 5e-4, 1e-3, 100)
            assert got == pytest.approx(
                meta_prob_exact_rayleigh(5e-4, 1e-3, 100), abs=1e-9)

    def test_nakagami_m1_matches_rayleigh(self):
        got = meta_prob_mismatch(Nakagami(1.0, 1.0), 5e-4, 1e-3, 100)
        assert got == pytest.approx(meta_prob_exact_rayleigh(5e-4, 1e-3, 100), abs=1e-9)

    def test_rician_k0_matches_rayleigh(self):
        got = meta_prob_mismatch(Rician(1.0, 0.0), 5e-4, 1e-3, 100)
        assert got == pytest.approx(meta_prob_exact_rayleigh(5e-4, 1e-3, 100), abs=1e-8)

    def test_scale_invariance(self):
        vals = [meta_prob_mismatch(Rician(lam, 2.0), 5e-4, 1e-3, 50)
                for lam in (0.1, 1.0, 10.0)]
        for v in vals:
            assert v == pytest.approx(vals[0], rel=1e-9)

    def test_method_validation(self):
        with pytest.raises(ValueError):
            meta_prob_mismatch(Rayleigh(1.0), 1e-3, 1e-3, 10, method="exact")


class TestChernoffTilt:
    def test_rician_quadratic_residual(self):
        # the tilt satisfies r w^2 - w - k = 0 with w = 1 - lam t*,
        # r = (eps/alpha)^kappa / (g lam)
        n = 10**3
        eps = 1e-4
        eps_n = epsn_rayleigh_pcr(eps, 1e-2, n)
        g = -math.log1p(-eps_n)
        for lam in (0.5, 1.0, 2.0):
            for k in (0.5, 2.0, 5.0):
                model = Rician(lam, k)
                sol = chernoff_tilt(model, eps_n, eps, n)
                assert sol.t_star < 1.0 / lam
                pl = model.power_law()
                r = (eps / pl.alpha) ** pl.kappa / (g * lam)
                w = 1.0 - lam * sol.t_star
                resid = r * w * w - w - k
                scale = max(r * w * w, abs(w), k, 1.0)
                assert abs(resid) <= 1e-8 * scale

    def test_nakagami_m1_vs_rayleigh_numeric_order_of_magnitude(self):
        n = 10**3
        eps = 1e-4
        eps_n = epsn_rayleigh_pcr(eps, 1e-2, n)
        bound = chernoff_tilt(Nakagami(1.0, 1.0), eps_n, eps, n).bound_value
        exact = meta_prob_exact_rayleigh(eps_n, eps, n)
        assert exact == pytest.approx(1e-2, abs=1e-8)
        assert 0.1 <= bound / exact <= 10.0

    def test_bound_upper_bounds_numeric(self):
        n = 10**3
        eps = 1e-4
        eps_n = epsn_rayleigh_pcr(eps, 1e-2, n)
        for model in [Nakagami(1.0, 1.0), Nakagami(1.0, 2.0), Rician(1.0, 1.0)]:
            bound = meta_prob_mismatch(model, eps_n, eps, n, method="chernoff")
            numeric = meta_prob_mismatch(model, eps_n, eps, n)
            assert 0.0 <= bound <= 1.0
            assert bound >= numeric

    def test_nonpositive_tilt_degenerates(self):
        # AR design: the threshold sits below the mean, no useful tilt
        n = 100
        eps_n = epsn_rayleigh_ar(1e-3, n)
        with pytest.warns(RuntimeWarning):
            sol = chernoff_tilt(Nakagami(1.0, 1.0), eps_n, 1e-3, n)
        assert sol.t_star <= 0.0
        assert sol.bound_value == 1.0

    def test_model_validation(self):
        with pytest.raises(TypeError):
            chernoff_tilt(3.14, 1e-3, 1e-3, 10)
