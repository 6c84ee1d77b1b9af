"""Closed-form impulse responses: cross-formula agreement, envelopes, GTF."""

import numpy as np
import pytest

from gef.core import (
    Domain,
    FilterParams,
    KernelTruncationError,
    ParameterError,
    SampledSignal,
    UnsupportedExponentError,
)
from gef.impulse_response import (
    envelope_bound,
    envelope_peak_time,
    filter_via_convolution,
    h_exact,
    h_gtf,
    h_half_integer,
    h_integer_polynomial,
    impulse_response_seconds,
    kernel_length,
)

# interior grid avoiding the cancellation-dominated region near t = 0 where
# the polynomial forms lose all significance in float64
T_SAFE = np.linspace(2.0, 200.0, 3001)


class TestCrossFormulaAgreement:
    @pytest.mark.parametrize("bu", [2, 3, 4, 5])
    @pytest.mark.parametrize("b_p", [0.8, 1.0])
    def test_integer_forms_match_bessel_form(self, bu, b_p):
        params = FilterParams(0.1, b_p, B_u=bu)
        ref = h_integer_polynomial(params, T_SAFE)
        val = h_exact(params, T_SAFE)
        scale = np.max(np.abs(ref))
        np.testing.assert_allclose(val, ref, rtol=0, atol=1e-10 * scale)

    @pytest.mark.parametrize("bu", ["3/2", "5/2", "7/2", "9/2"])
    @pytest.mark.parametrize("b_p", [0.8, 1.0])
    def test_half_integer_forms_match_bessel_form(self, bu, b_p):
        params = FilterParams(0.05, b_p, B_u=bu)
        ref = h_half_integer(params, T_SAFE)
        val = h_exact(params, T_SAFE)
        scale = np.max(np.abs(ref))
        np.testing.assert_allclose(val, ref, rtol=0, atol=1e-10 * scale)

    def test_unit_exponent_is_damped_sine(self):
        params = FilterParams(0.1, 0.9, B_u=1)
        t = np.linspace(0.0, 50.0, 500)
        expected = np.exp(-0.1 * t) * np.sin(0.9 * t) / 0.9
        np.testing.assert_allclose(h_exact(params, t), expected, rtol=0, atol=1e-14)

    def test_three_halves_reduces_to_j1(self):
        from scipy.special import jv
        params = FilterParams(0.1, 1.0, B_u="3/2")
        t = np.linspace(0.5, 80.0, 200)
        expected = np.exp(-0.1 * t) * t * jv(1, t)
        np.testing.assert_allclose(h_exact(params, t), expected, rtol=1e-12, atol=1e-15)

    def test_large_integer_folds_into_bessel_form(self):
        params = FilterParams(0.1, 1.0, B_u=7)
        assert h_integer_polynomial(params, 15.0) == h_exact(params, 15.0)


class TestBoundaryAndDecay:
    def test_zero_at_origin_above_three_halves(self):
        for bu in ("3/2", 2, "5/2", 4):
            assert h_exact(FilterParams(0.1, 1.0, B_u=bu), 0.0) == 0.0

    def test_rejects_half_and_below(self):
        with pytest.raises(UnsupportedExponentError):
            h_exact(FilterParams(0.1, 1.0, B_u="1/2"), 1.0)

    def test_rejects_negative_time(self):
        with pytest.raises(ParameterError):
            h_exact(FilterParams(0.1, 1.0, B_u=2), -1.0)

    def test_envelope_bound_holds(self):
        # |J_nu| <= 1 for nu >= 0 gives a strict envelope; decay is
        # exponential as stability requires
        t = np.linspace(0.01, 300.0, 5000)
        for bu in (2, "5/2", 5):
            params = FilterParams(0.1, 1.0, B_u=bu)
            assert np.all(np.abs(h_exact(params, t)) <= envelope_bound(params, t) * (1 + 1e-12))


class TestEnvelopePeak:
    def test_rule_values(self):
        assert envelope_peak_time(FilterParams(0.1, 1.0, B_u=3)).rule == pytest.approx(20.0)
        assert envelope_peak_time(FilterParams(0.05, 1.0, B_u=2)).rule == pytest.approx(20.0)

    def test_numeric_within_one_tonal_period_of_rule(self):
        for a_p, bu in ((0.1, 3), (0.05, 2), (0.1, "5/2")):
            params = FilterParams(a_p, 1.0, B_u=bu)
            peak = envelope_peak_time(params)
            period = 2 * np.pi / params.b_p
            assert abs(peak.numeric - peak.rule) < period

    def test_both_rules_reported(self):
        peak = envelope_peak_time(FilterParams(0.1, 1.0, B_u=2))
        assert peak.rule == pytest.approx(10.0)
        assert peak.rule_half == pytest.approx(15.0)

    def test_needs_exponent_above_one(self):
        with pytest.raises(UnsupportedExponentError):
            envelope_peak_time(FilterParams(0.1, 1.0, B_u=1))


class TestGtfApproximant:
    def test_tonal_phase_matches_highest_order_term_bu2(self):
        # cos(t - pi) = -cos(t): same oscillation as the dominant term
        params = FilterParams(0.05, 1.0, B_u=2)
        t = np.linspace(40.0, 60.0, 400)
        gtf = h_gtf(params, t, envelope_exponent="integer", scale=0.5)
        expected = 0.5 * np.exp(-0.05 * t) * t * (-np.cos(t))
        np.testing.assert_allclose(gtf, expected, rtol=1e-12)

    def test_tonal_phase_matches_highest_order_term_bu3(self):
        # cos(t - 3 pi/2) = -sin(t)
        params = FilterParams(0.05, 1.0, B_u=3)
        t = np.linspace(40.0, 60.0, 400)
        gtf = h_gtf(params, t, envelope_exponent="integer", scale=0.125)
        expected = 0.125 * np.exp(-0.05 * t) * t**2 * (-np.sin(t))
        np.testing.assert_allclose(gtf, expected, rtol=1e-12)

    def test_envelope_maxima_match(self):
        params = FilterParams(0.1, 1.0, B_u="5/2")
        t = np.linspace(1e-3, 150.0, 60000)
        ratio = np.max(np.abs(h_gtf(params, t))) / np.max(np.abs(h_exact(params, t)))
        assert ratio == pytest.approx(1.0, abs=0.02)

    def _l2_error(self, params):
        peak = envelope_peak_time(params).rule
        t = np.linspace(0.5 * peak, 5.0 * peak, 4000)
        he = h_exact(params, t)
        hg = h_gtf(params, t)
        return np.linalg.norm(he - hg) / np.linalg.norm(he)

    @pytest.mark.parametrize("bu", [2, "5/2"])
    def test_error_shrinks_with_damping(self, bu):
        errs = [self._l2_error(FilterParams(a, 1.0, B_u=bu)) for a in (0.2, 0.1, 0.05)]
        assert errs[0] > errs[1] > errs[2]

    def test_small_damping_approximation_good_beyond_early_times(self):
        # measured L2 errors over [peak/2, 5*peak] at A_p=0.1, B_u=5/2:
        # 0.27 for the half-exponent envelope, 0.12 for the integer one
        params = FilterParams(0.1, 1.0, B_u="5/2")
        peak = envelope_peak_time(params).rule
        t = np.linspace(0.5 * peak, 5.0 * peak, 4000)
        he = h_exact(params, t)
        err_half = np.linalg.norm(he - h_gtf(params, t)) / np.linalg.norm(he)
        err_int = np.linalg.norm(he - h_gtf(params, t, envelope_exponent="integer")) \
            / np.linalg.norm(he)
        assert err_half < 0.30
        assert err_int < 0.15
        assert err_int < err_half


class TestSecondsDomain:
    def test_zero_at_origin(self):
        params = FilterParams(0.1, 1.0, B_u=2, CF=1000.0)
        assert impulse_response_seconds(params, 0.0) == 0.0

    def test_cf_scaling_compresses_and_scales(self):
        p1 = FilterParams(0.1, 1.0, B_u=2, CF=1000.0)
        p2 = FilterParams(0.1, 1.0, B_u=2, CF=2000.0)
        t = np.linspace(1e-4, 5e-3, 50)
        np.testing.assert_allclose(impulse_response_seconds(p2, t),
                                   2.0 * impulse_response_seconds(p1, 2.0 * t), rtol=1e-12)

    def test_tonal_period_at_2khz(self):
        # tonal frequency b_p * CF = 2 kHz -> period 0.5 ms
        params = FilterParams(0.1, 1.0, B_u=2, CF=2000.0)
        t = np.linspace(0, 10e-3, 20001)
        g = impulse_response_seconds(params, t)
        zero_crossings = np.nonzero(np.diff(np.sign(g)))[0]
        gaps = np.diff(t[zero_crossings])
        assert np.median(gaps) == pytest.approx(0.25e-3, rel=0.02)

    def test_requires_cf(self):
        with pytest.raises(ParameterError):
            impulse_response_seconds(FilterParams(0.1, 1.0, B_u=2), 1e-3)


class TestConvolutionFiltering:
    def test_zero_in_zero_out(self):
        sig = SampledSignal(np.zeros(500), 0.02, Domain.SCALED_TIME)
        out = filter_via_convolution(sig, FilterParams(0.1, 1.0, B_u=2))
        np.testing.assert_allclose(out.values, 0.0)

    def test_linearity(self):
        rng = np.random.default_rng(7)
        u1 = rng.normal(size=400)
        u2 = rng.normal(size=400)
        params = FilterParams(0.1, 1.0, B_u="5/2")
        mk = lambda v: SampledSignal(v, 0.05, Domain.SCALED_TIME)
        lhs = filter_via_convolution(mk(2.0 * u1 - 3.0 * u2), params).values
        rhs = 2.0 * filter_via_convolution(mk(u1), params).values \
            - 3.0 * filter_via_convolution(mk(u2), params).values
        np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12 * np.max(np.abs(rhs)))

    def test_kernel_covers_envelope_decay(self):
        params = FilterParams(0.1, 1.0, B_u=2)
        n = kernel_length(params, 0.01)
        t_end = 0.01 * (n - 1)
        env_max, _ = np.max(np.abs(h_exact(params, np.linspace(0.01, 60, 6000)))), None
        assert envelope_bound(params, t_end) < 1.1e-6 * env_max

    def test_truncation_budget_guard(self):
        with pytest.raises(KernelTruncationError):
            kernel_length(FilterParams(0.001, 1.0, B_u=2), 1e-5)


class TestSpectralConsistency:
    @pytest.mark.parametrize("bu", [2, "5/2", 3])
    def test_dft_of_sampled_h_matches_tf_near_peak(self, bu):
        # the sampled impulse response, transformed, reproduces the
        # transfer function to 1% in the peak region
        from gef.characteristics import peak_beta, q_ndb
        from gef.transfer_function import eval_tf

        params = FilterParams(0.1, 1.0, B_u=bu)
        step = 0.02
        n = kernel_length(params, step)
        t = step * np.arange(n)
        h = h_exact(params, t)
        padded = 1 << int(np.ceil(np.log2(4 * n)))
        betas = 2.0 * np.pi * np.fft.rfftfreq(padded, d=step)
        spectrum = np.fft.rfft(h, padded) * step
        bp = peak_beta(params)
        bw3 = bp / q_ndb(params, 3.0)
        region = np.abs(betas - bp) < 3.0 * bw3
        tf = eval_tf(params, betas[region])
        rel = np.max(np.abs(spectrum[region] - tf)) / np.max(np.abs(tf))
        assert rel < 1e-2
