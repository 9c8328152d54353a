import math

import numpy as np
import pytest
import scipy.stats

from statrate.channels import Rayleigh
from statrate.errors import InsufficientTailDataError, SampleParseError
from statrate.learn import (
    TailFit,
    TrainingSample,
    empirical_cdf,
    fit_power_tail,
    load_sample_file,
    rayleigh_mle,
    tail_quantile,
)

RNG = lambda s: np.random.Generator(np.random.Philox(key=np.array([s, 0], dtype=np.uint64)))


class TestTrainingSample:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            TrainingSample([])

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            TrainingSample([1.0, -0.5, 2.0])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            TrainingSample([1.0, math.nan])
        with pytest.raises(ValueError):
            TrainingSample([1.0, math.inf])

    def test_rejects_multidimensional(self):
        with pytest.raises(ValueError):
            TrainingSample([[1.0, 2.0], [3.0, 4.0]])

    def test_values_are_read_only(self):
        s = TrainingSample([3.0, 1.0, 2.0])
        with pytest.raises(ValueError):
            s.values[0] = 7.0
        with pytest.raises(ValueError):
            s.sorted_values[0] = 7.0

    def test_sorted_is_a_permutation(self):
        rng = RNG(11)
        vals = rng.exponential(size=57)
        s = TrainingSample(vals)
        assert s.n == 57
        np.testing.assert_allclose(s.sorted_values, np.sort(vals))
        np.testing.assert_allclose(s.values, vals)

    def test_order_stat_boundaries(self):
        s = TrainingSample([5.0, 1.0, 3.0])
        assert s.order_stat(0) == 0.0
        assert s.order_stat(4) == math.inf
        assert s.order_stat(1) == 1.0
        assert s.order_stat(2) == 3.0
        assert s.order_stat(3) == 5.0
        with pytest.raises(IndexError):
            s.order_stat(-1)
        with pytest.raises(IndexError):
            s.order_stat(5)

    def test_order_stat_matches_sort(self):
        rng = RNG(12)
        vals = rng.exponential(size=40)
        s = TrainingSample(vals)
        srt = np.sort(vals)
        for l in range(1, 41):
            assert s.order_stat(l) == srt[l - 1]

    def test_smallest(self):
        s = TrainingSample([5.0, 1.0, 3.0, 2.0])
        np.testing.assert_allclose(s.smallest(3), [1.0, 2.0, 3.0])
        with pytest.raises(IndexError):
            s.smallest(0)
        with pytest.raises(IndexError):
            s.smallest(5)


class TestRayleighMle:
    def test_singleton(self):
        assert rayleigh_mle(TrainingSample([2.0])) == 2.0

    def test_arithmetic_mean(self):
        assert rayleigh_mle(TrainingSample([1.0, 2.0, 3.0])) == pytest.approx(2.0, rel=1e-15)

    def test_large_sample_clt(self):
        # SE of the mean of 1e6 exponential(5) draws is 5/1e3
        sample = TrainingSample(Rayleigh(5.0).sample(RNG(101), 10**6))
        assert abs(rayleigh_mle(sample) - 5.0) < 3.0 * (5.0 / 10**3)


class TestEmpiricalCdf:
    def test_counting_example(self):
        s = TrainingSample([1.0, 2.0, 4.0])
        assert empirical_cdf(s, 2.0) == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_below_min_and_above_max(self):
        s = TrainingSample([1.0, 2.0, 4.0])
        assert empirical_cdf(s, 0.999) == 0.0
        assert empirical_cdf(s, 4.0) == 1.0
        assert empirical_cdf(s, 100.0) == 1.0

    def test_bracket_property(self):
        # F-hat(y) = (i-1)/n exactly when x_(i-1) <= y < x_(i)
        rng = RNG(13)
        vals = rng.exponential(size=25)
        s = TrainingSample(vals)
        srt = np.sort(vals)
        for i in range(1, 26):
            lo = 0.0 if i == 1 else srt[i - 2]
            y = 0.5 * (lo + srt[i - 1])
            assert empirical_cdf(s, y) == (i - 1) / 25
            assert empirical_cdf(s, srt[i - 1]) == i / 25


class TestFitPowerTail:
    def test_direct_substitution(self):
        # three smallest log-values are (0, 1, 2); seven larger fillers
        vals = [1.0, math.e, math.e**2] + [8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0]
        fit = fit_power_tail(TrainingSample(vals), 0.3)
        assert fit.l == 3
        assert fit.beta == 0.3
        assert fit.z_l == pytest.approx(2.0, abs=1e-14)
        assert fit.kappa_hat == pytest.approx(1.0, rel=1e-13)
        assert fit.alpha_hat == pytest.approx(0.3 * math.exp(-2.0), rel=1e-12)
        assert fit.alpha_hat == pytest.approx(0.0406006, abs=5e-8)

    def test_rayleigh_truth_recovery(self):
        # Rayleigh{1} lower tail: alpha = 1, kappa = 1
        sample = TrainingSample(Rayleigh(1.0).sample(RNG(102), 10**6))
        fit = fit_power_tail(sample, 0.01)
        assert fit.l == 10**4
        assert abs(fit.kappa_hat - 1.0) < 0.05
        assert abs(fit.alpha_hat - 1.0) < 0.1

    def test_scaling_property(self):
        rng = RNG(14)
        vals = rng.exponential(size=500) + 1e-12
        base = fit_power_tail(TrainingSample(vals), 0.1)
        for c in (0.5, 3.7):
            scaled = fit_power_tail(TrainingSample(c * vals), 0.1)
            assert scaled.kappa_hat == pytest.approx(base.kappa_hat, rel=1e-10)
            assert scaled.alpha_hat == pytest.approx(
                base.alpha_hat * c ** (-1.0 / base.kappa_hat), rel=1e-9)

    def test_ceil_float_guard(self):
        # 0.07 * 100 = 7.000000000000001 in binary; l must still be 7
        vals = np.linspace(1.0, 2.0, 100)
        fit = fit_power_tail(TrainingSample(vals), 0.07)
        assert fit.l == 7

    def test_beta_domain(self):
        s = TrainingSample(np.linspace(1.0, 2.0, 50))
        for bad in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                fit_power_tail(s, bad)

    def test_insufficient_tail(self):
        s = TrainingSample(np.linspace(1.0, 2.0, 10))
        with pytest.raises(InsufficientTailDataError):
            fit_power_tail(s, 0.05)
        with pytest.raises(InsufficientTailDataError):
            fit_power_tail(TrainingSample([1.0]), 0.5)

    def test_zero_values_rejected(self):
        s = TrainingSample([0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0])
        with pytest.raises(ValueError):
            fit_power_tail(s, 0.3)

    def test_degenerate_tail(self):
        s = TrainingSample([1.0, 1.0, 1.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0])
        with pytest.raises(InsufficientTailDataError):
            fit_power_tail(s, 0.3)


class TestTailFitType:
    def test_zero_kappa_allowed(self):
        TailFit(alpha_hat=1.0, kappa_hat=0.0, l=5, beta=0.1, z_l=0.0)

    def test_negative_kappa_rejected(self):
        with pytest.raises(ValueError):
            TailFit(alpha_hat=1.0, kappa_hat=-1e-9, l=5, beta=0.1, z_l=0.0)

    def test_nonpositive_alpha_rejected(self):
        with pytest.raises(ValueError):
            TailFit(alpha_hat=0.0, kappa_hat=1.0, l=5, beta=0.1, z_l=0.0)


class TestTailQuantile:
    def test_unit_fit_value(self):
        fit = TailFit(alpha_hat=1.0, kappa_hat=1.0, l=5, beta=0.1, z_l=0.0)
        assert tail_quantile(fit, 1e-3) == pytest.approx(math.log(1e-3), rel=1e-13)
        assert tail_quantile(fit, 1e-3) == pytest.approx(-6.907755, abs=5e-7)

    def test_returns_z_l_at_level_l_over_n(self):
        rng = RNG(15)
        for n, beta in [(100, 0.1), (500, 0.05), (1000, 0.013)]:
            fit = fit_power_tail(TrainingSample(rng.exponential(size=n)), beta)
            got = tail_quantile(fit, fit.l / n)
            assert got == pytest.approx(fit.z_l, rel=1e-12, abs=1e-12)

    def test_both_algebraic_forms_agree(self):
        rng = RNG(16)
        for n, beta in [(100, 0.1), (400, 0.03), (2000, 0.01)]:
            fit = fit_power_tail(TrainingSample(rng.exponential(size=n)), beta)
            for eps_n in (1e-6, 1e-4, 1e-2, 0.3):
                direct = tail_quantile(fit, eps_n)
                order_form = fit.z_l + fit.kappa_hat * math.log(n * eps_n / fit.l)
                assert abs(direct - order_form) <= 1e-12 * max(1.0, abs(direct))

    def test_domain(self):
        fit = TailFit(alpha_hat=1.0, kappa_hat=1.0, l=5, beta=0.1, z_l=0.0)
        for bad in (0.0, 1.0, -0.5):
            with pytest.raises(ValueError):
                tail_quantile(fit, bad)


class TestErlangStatistic:
    def test_sum_is_erlang_and_independent_of_pivot(self):
        # pure power law: Y = U^kappa has F(y) = y^(1/kappa) on [0,1],
        # so l*kappa_hat = sum(Z_(l)-Z_(i)) is exactly Gamma(l-1, scale=kappa)
        # and independent of Z_(l)
        kappa = 2.0
        n, beta, trials = 200, 0.05, 2000
        rng = RNG(103)
        sums = np.empty(trials)
        pivots = np.empty(trials)
        for t in range(trials):
            fit = fit_power_tail(TrainingSample(rng.random(n) ** kappa), beta)
            assert fit.l == 10
            sums[t] = fit.l * fit.kappa_hat
            pivots[t] = fit.z_l
        ks = scipy.stats.kstest(sums, scipy.stats.gamma(a=9, scale=kappa).cdf)
        assert ks.pvalue > 0.01
        corr = np.corrcoef(pivots, sums)[0, 1]
        assert abs(corr) <= 4.0 / math.sqrt(trials)


class TestTailQuantileVariance:
    def test_asymptotic_variance(self):
        # sample variance of the fitted quantile matches kappa^2*Vbar/n
        # with Vbar = (1 - beta + log^2(eps/beta)) / beta
        n, beta, eps, reps = 10**5, 0.01, 1e-4, 10**4
        vbar = (1.0 - beta + math.log(eps / beta) ** 2) / beta
        expected = vbar / n
        model = Rayleigh(1.0)
        rng = RNG(104)
        q = np.empty(reps)
        for r in range(reps):
            fit = fit_power_tail(TrainingSample(model.sample(rng, n)), beta)
            q[r] = tail_quantile(fit, eps)
        ratio = float(np.var(q, ddof=1)) / expected
        assert 0.85 < ratio < 1.15


class TestLoadSampleFile:
    def test_valid_file(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("1.5\n\n  2e-3  \n0\n4\n")
        s = load_sample_file(p)
        np.testing.assert_allclose(s.values, [1.5, 2e-3, 0.0, 4.0])

    def test_unparsable_line_number(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("1.0\n2.0\nbogus\n4.0\n")
        with pytest.raises(SampleParseError) as exc:
            load_sample_file(p)
        assert exc.value.line_no == 3
        assert "3" in str(exc.value)

    def test_blank_lines_do_not_shift_numbering(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("1.0\n\n\n-2.0\n")
        with pytest.raises(SampleParseError) as exc:
            load_sample_file(p)
        assert exc.value.line_no == 4

    def test_non_finite_rejected(self, tmp_path):
        for text in ("inf", "nan", "-inf"):
            p = tmp_path / "s.txt"
            p.write_text(f"1.0\n{text}\n")
            with pytest.raises(SampleParseError) as exc:
                load_sample_file(p)
            assert exc.value.line_no == 2

    def test_empty_file(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("\n  \n")
        with pytest.raises(SampleParseError) as exc:
            load_sample_file(p)
        assert exc.value.line_no is None

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_sample_file(tmp_path / "absent.txt")
