"""Parameter types, pole conventions and scaled-time mapping."""

import warnings
from fractions import Fraction

import numpy as np
import pytest

from gef.core import (
    DegenerateBandpassWarning,
    Domain,
    FilterParams,
    GridError,
    NonPositiveConstantError,
    NonRationalExponentError,
    SampledSignal,
    as_exponent,
    pole,
    scaled_time,
    unscale_time,
    validate,
)


class TestPole:
    def test_definition(self):
        p = pole(FilterParams(A_p=0.1, b_p=1.0))
        assert p.value == complex(-0.1, 1.0)

    def test_magnitude(self):
        # b_p == A_p is the degenerate edge: still a valid pole, but flagged
        with pytest.warns(DegenerateBandpassWarning):
            p = pole(FilterParams(A_p=1.0, b_p=1.0, B_u=2))
        assert p.value == complex(-1.0, 1.0)
        assert p.magnitude_sq == pytest.approx(2.0)

    def test_left_half_plane(self):
        for a_p in (0.05, 0.3, 2.0):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateBandpassWarning)
                p = pole(FilterParams(A_p=a_p, b_p=1.0))
            assert p.value.real < 0

    def test_conjugate(self):
        p = pole(FilterParams(A_p=0.05, b_p=1.0))
        assert p.conjugate == complex(-0.05, -1.0)


class TestScaledTime:
    def test_one_ms_at_1khz(self):
        assert scaled_time(1e-3, 1000.0) == pytest.approx(2.0 * np.pi)

    def test_zero(self):
        assert scaled_time(0.0, 440.0) == 0.0

    def test_20ms_at_2khz(self):
        assert scaled_time(20e-3, 2000.0) == pytest.approx(80.0 * np.pi)

    def test_round_trip(self):
        for cf in (20.0, 440.0, 2000.0, 20000.0):
            t = 0.0123
            assert unscale_time(scaled_time(t, cf), cf) == pytest.approx(t, rel=1e-15)

    def test_nonpositive_cf(self):
        with pytest.raises(NonPositiveConstantError):
            scaled_time(1.0, 0.0)
        with pytest.raises(NonPositiveConstantError):
            unscale_time(1.0, -5.0)


class TestValidate:
    def test_accepts_rational(self):
        params = validate(FilterParams(A_p=0.1, b_p=1.0, B_u=Fraction(5, 2)))
        assert params.B_u == Fraction(5, 2)

    def test_rejects_negative_damping(self):
        with pytest.raises(NonPositiveConstantError):
            validate(FilterParams(A_p=-0.1, b_p=1.0, B_u=2))

    def test_rejects_zero_tonal(self):
        with pytest.raises(NonPositiveConstantError):
            validate(FilterParams(A_p=0.1, b_p=0.0, B_u=2))

    def test_degenerate_flagged_not_rejected(self):
        with pytest.warns(DegenerateBandpassWarning):
            params = validate(FilterParams(A_p=2.0, b_p=1.0, B_u=2))
        assert not params.is_bandpass


class TestExponentStorage:
    def test_lowest_terms(self):
        assert as_exponent("10/4") == Fraction(5, 2)

    def test_zero_denominator(self):
        with pytest.raises(NonRationalExponentError):
            as_exponent("3/0")

    def test_denominator_cap(self):
        with pytest.raises(NonRationalExponentError):
            as_exponent(Fraction(1, 65))

    def test_float_snapping(self):
        assert as_exponent(2.5) == Fraction(5, 2)
        assert as_exponent(0.3333333333) == Fraction(1, 3)

    def test_round_trip_exact_for_small_denominators(self):
        for den in range(1, 65):
            for num in (1, 3, den + 1, 5 * den + 2):
                frac = Fraction(num, den)
                params = FilterParams(A_p=0.1, B_u=frac)
                assert params.exponent == num / den
                assert params.B_u == frac


class TestSampledSignal:
    def test_domain_conversion_uses_scaled_time(self):
        sig = SampledSignal(np.zeros(10), step=1e-4, domain=Domain.SECONDS)
        scaled = sig.to_scaled_time(1000.0)
        assert scaled.step == pytest.approx(2.0 * np.pi * 1000.0 * 1e-4)
        back = scaled.to_seconds(1000.0)
        assert back.step == pytest.approx(1e-4)

    def test_rejects_nonpositive_step(self):
        with pytest.raises(GridError):
            SampledSignal(np.zeros(4), step=0.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(GridError):
            SampledSignal(np.array([0.0, np.inf]), step=0.1)

    def test_times(self):
        sig = SampledSignal(np.zeros(3), step=0.5, start=1.0)
        np.testing.assert_allclose(sig.times, [1.0, 1.5, 2.0])
