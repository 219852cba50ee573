import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from iptrans.specfun import DoubleRangeError, bessel_k, log_bessel_k

from oracles import bessel_k_integral, log_bessel_k_integral


def k_half_closed(x: float) -> float:
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x)


class TestClosedForms:
    def test_half_order_at_two(self):
        assert bessel_k(0.5, 2.0) == pytest.approx(k_half_closed(2.0), rel=1e-13)

    def test_negative_half_order_matches_positive(self):
        assert bessel_k(-0.5, 2.0) == bessel_k(0.5, 2.0)

    def test_three_halves_recurrence_from_closed_forms(self):
        # K_{3/2}(x) = K_{-1/2}(x) + (1/x) K_{1/2}(x), all in closed form
        x = 3.0
        expected = k_half_closed(x) + k_half_closed(x) / x
        assert bessel_k(1.5, x) == pytest.approx(expected, rel=1e-13)

    def test_half_order_grid(self):
        for x in (0.01, 0.1, 1.0, 10.0, 100.0, 350.0, 700.0):
            assert log_bessel_k(0.5, x) == pytest.approx(
                0.5 * math.log(math.pi / (2.0 * x)) - x, abs=1e-12, rel=1e-12
            )

    def test_log_at_five_hundred(self):
        assert log_bessel_k(0.5, 500.0) == pytest.approx(
            0.5 * math.log(math.pi / 1000.0) - 500.0, abs=1e-9
        )

    def test_log_matches_closed_form_at_two(self):
        assert log_bessel_k(0.5, 2.0) == pytest.approx(
            math.log(k_half_closed(2.0)), abs=1e-12
        )


class TestOracleGrid:
    NU = (-50.0, -12.25, -5.0, -0.5, 0.0, 0.25, 1.0, 3.75, 12.25, 50.0)
    X = (1e-6, 1e-3, 0.5, 2.0, 10.0, 100.0, 700.0)

    def test_relative_accuracy_against_integral_oracle(self):
        worst = 0.0
        for nu in self.NU:
            for x in self.X:
                ref_log = log_bessel_k_integral(nu, x)
                got_log = log_bessel_k(nu, x)
                assert got_log == pytest.approx(ref_log, abs=1e-9)
                if abs(ref_log) < 700.0:
                    ref = float(bessel_k_integral(nu, x))
                    rel = abs(bessel_k(nu, x) - ref) / ref
                    worst = max(worst, rel)
        assert worst <= 1e-10

    def test_small_argument_series_example(self):
        # leading behaviour K_nu(x) ~ (1/2) Gamma(nu) (2/x)^nu for small x
        got = log_bessel_k(3.0, 1e-4)
        assert got == pytest.approx(log_bessel_k_integral(3.0, 1e-4), abs=1e-11)
        leading = math.log(0.5) + math.lgamma(3.0) + 3.0 * math.log(2.0 / 1e-4)
        assert got == pytest.approx(leading, rel=1e-7)


class TestInvariants:
    def test_symmetry_is_exact(self):
        for nu in (0.25, 1.0, 3.5, 12.75, 50.0):
            for x in (1e-5, 0.3, 2.0, 50.0, 700.0):
                assert log_bessel_k(nu, x) == log_bessel_k(-nu, x)

    def test_recurrence_grid(self):
        worst = 0.0
        for nu in np.arange(-5.0, 5.0 + 0.125, 0.25):
            for x in (0.01, 0.1, 1.0, 10.0, 100.0):
                km1 = bessel_k(nu - 1.0, x)
                k0 = bessel_k(nu, x)
                kp1 = bessel_k(nu + 1.0, x)
                defect = abs(kp1 - km1 - (2.0 * nu / x) * k0) / kp1
                worst = max(worst, defect)
        assert worst <= 1e-9

    def test_monotone_decreasing_in_x(self):
        xs = np.geomspace(1e-6, 700.0, 60)
        for nu in (-7.5, 0.0, 0.5, 3.0, 42.0):
            values = [log_bessel_k(nu, x) for x in xs]
            assert all(b < a for a, b in zip(values, values[1:]))

    def test_exp_log_consistency(self):
        for nu in (-20.0, -0.75, 0.0, 1.5, 33.0):
            for x in (1e-4, 0.2, 3.0, 80.0, 600.0):
                k = bessel_k(nu, x)
                assert math.exp(log_bessel_k(nu, x)) == pytest.approx(k, rel=1e-9)


class TestErrors:
    @pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
    def test_domain_error_on_bad_argument(self, x):
        with pytest.raises(ValueError):
            bessel_k(0.5, x)
        with pytest.raises(ValueError):
            log_bessel_k(0.5, x)

    def test_domain_error_on_bad_order(self):
        with pytest.raises(ValueError):
            bessel_k(math.nan, 1.0)
        with pytest.raises(ValueError):
            bessel_k(math.inf, 1.0)

    def test_underflow_raises_range_error(self):
        with pytest.raises(DoubleRangeError):
            bessel_k(0.5, 760.0)
        assert log_bessel_k(0.5, 760.0) == pytest.approx(
            0.5 * math.log(math.pi / 1520.0) - 760.0, abs=1e-9
        )

    def test_overflow_raises_range_error(self):
        with pytest.raises(DoubleRangeError):
            bessel_k(120.0, 0.01)
        assert log_bessel_k(120.0, 0.01) == pytest.approx(
            log_bessel_k_integral(120.0, 0.01), abs=1e-9
        )

    def test_range_error_is_arithmetic(self):
        assert issubclass(DoubleRangeError, ArithmeticError)


class TestProperties:
    @given(
        nu=st.floats(-50.0, 50.0),
        x=st.floats(math.log(1e-6), math.log(700.0)).map(math.exp),
    )
    def test_symmetry_property(self, nu, x):
        assert log_bessel_k(nu, x) == log_bessel_k(-nu, x)

    @given(
        nu=st.floats(-20.0, 20.0),
        x=st.floats(math.log(1e-3), math.log(500.0)).map(math.exp),
    )
    def test_recurrence_property(self, nu, x):
        logs = [log_bessel_k(nu + d, x) for d in (-1.0, 0.0, 1.0)]
        if max(abs(v) for v in logs) > 650.0:
            return  # values leave double range; recurrence checked in logs only
        km1, k0, kp1 = (math.exp(v) for v in logs)
        scale = max(kp1, km1, abs(2.0 * nu / x) * k0)
        assert kp1 - km1 - (2.0 * nu / x) * k0 == pytest.approx(0.0, abs=1e-9 * scale)

    @given(
        nu=st.floats(-50.0, 50.0),
        x=st.floats(math.log(1e-6), math.log(700.0)).map(math.exp),
    )
    def test_positive_and_finite_in_log_domain(self, nu, x):
        value = log_bessel_k(nu, x)
        assert math.isfinite(value)
