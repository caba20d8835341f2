import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sci
from scipy.special import eval_legendre

from narrow_escape.quadrature import (
    QuadratureError,
    QuadratureSpec,
    integrate,
    integrate_sqrt_singular,
    legendre_p,
    legendre_table,
)


class TestSpec:
    @pytest.mark.parametrize(
        "kwargs", [dict(abs_tol=0.0), dict(abs_tol=-1.0), dict(rel_tol=-1e-3), dict(max_subdivisions=0)]
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            QuadratureSpec(**kwargs)

    def test_defaults(self):
        s = QuadratureSpec()
        assert (s.abs_tol, s.rel_tol, s.max_subdivisions) == (1e-10, 1e-10, 500)


class TestIntegrate:
    def test_constant(self):
        assert integrate(np.ones_like, 0.0, 1.0).value == pytest.approx(1.0, abs=1e-14)

    def test_square(self):
        assert integrate(lambda s: s * s, 0.0, 2.0).value == pytest.approx(8.0 / 3.0, abs=1e-13)

    def test_arcsin_over_s(self):
        # the integrand is finite at 0 and has a sqrt-type cusp in its derivative at 1
        res = integrate(lambda s: np.arcsin(s) / s, 0.0, 1.0)
        assert res.value == pytest.approx(math.pi / 2 * math.log(2), abs=1e-9)
        assert res.error_estimate >= 0
        assert res.subdivisions_used <= QuadratureSpec().max_subdivisions

    def test_empty_interval(self):
        assert integrate(np.sin, 1.0, 1.0).value == 0.0

    def test_reversed_interval(self):
        with pytest.raises(ValueError):
            integrate(np.sin, 1.0, 0.0)

    def test_non_convergence(self):
        spec = QuadratureSpec(abs_tol=1e-14, rel_tol=0.0, max_subdivisions=3)
        with pytest.raises(QuadratureError) as info:
            integrate(lambda s: np.sin(1.0 / s), 1e-3, 1.0, spec)
        assert info.value.error_estimate > 0

    def test_non_finite(self):
        with pytest.raises(QuadratureError):
            integrate(lambda s: np.full_like(s, np.nan), 0.0, 1.0)

    @given(
        st.floats(-3, 3),
        st.floats(0.1, 4),
        st.floats(0.5, 6),
    )
    def test_matches_scipy_on_smooth(self, a, width, k):
        f = lambda s: np.cos(k * s) * np.exp(-s * s / 4)
        mine = integrate(f, a, a + width).value
        ref = sci.quad(lambda s: math.cos(k * s) * math.exp(-s * s / 4), a, a + width, epsabs=1e-13)[0]
        assert mine == pytest.approx(ref, abs=1e-10)


class TestSqrtSingular:
    def test_unit(self):
        assert integrate_sqrt_singular(np.ones_like, 0.0, 1.0, "right").value == pytest.approx(2.0, abs=1e-13)

    def test_linear(self):
        assert integrate_sqrt_singular(lambda s: s, 0.0, 1.0, "right").value == pytest.approx(4 / 3, abs=1e-13)

    def test_left(self):
        # int_0^1 s^2 / sqrt(s) ds = 2/5
        assert integrate_sqrt_singular(lambda s: s * s, 0.0, 1.0, "left").value == pytest.approx(0.4, abs=1e-13)

    def test_cos_half(self):
        # cos s + 1 = 2 cos^2(s/2), so the weight 1/sqrt(cos s + 1) cancels cos(s/2) up to 1/sqrt 2
        def smooth(s):
            # 1/sqrt(cos s + 1) = 1/sqrt(pi - s) * sqrt(pi - s)/sqrt(cos s + 1)
            return np.cos(s / 2) * np.sqrt(np.pi - s) / (np.sqrt(2.0) * np.cos(s / 2))

        res = integrate_sqrt_singular(smooth, 0.0, np.pi, "right")
        assert res.value == pytest.approx(math.pi / math.sqrt(2), abs=1e-10)

    def test_bad_end(self):
        with pytest.raises(ValueError):
            integrate_sqrt_singular(np.ones_like, 0.0, 1.0, "middle")

    @given(st.floats(-2, 2), st.floats(0.1, 3))
    def test_agrees_with_plain_on_smooth(self, a, width):
        # f(s) sqrt(b - s) is smooth enough for both routes
        b = a + width
        f = lambda s: np.exp(s) * np.sqrt(b - s) ** 2
        plain = integrate(lambda s: np.exp(s) * np.sqrt(b - s), a, b).value
        sub = integrate_sqrt_singular(f, a, b, "right").value
        assert sub == pytest.approx(plain, abs=2e-9)


def _p5(x):
    return (63 * x**5 - 70 * x**3 + 15 * x) / 8


class TestLegendre:
    def test_low_degrees(self):
        assert legendre_p(0, 0.3) == 1.0
        assert legendre_p(1, 0.3) == 0.3

    def test_degree_five(self):
        assert legendre_p(5, 0.7) == pytest.approx(_p5(0.7), abs=1e-15)

    def test_domain(self):
        with pytest.raises(ValueError):
            legendre_p(3, 1.01)
        with pytest.raises(ValueError):
            legendre_p(-1, 0.2)
        assert legendre_p(7, 1.0 + 1e-13) == pytest.approx(1.0)

    @pytest.mark.parametrize("x", [-1.0, -0.5, 0.0, 0.5, 1.0])
    def test_recurrence(self, x):
        p = legendre_table(201, x)
        n = np.arange(1, 201)
        lhs = (n + 1) * p[2:]
        rhs = (2 * n + 1) * x * p[1:-1] - n * p[:-2]
        assert np.max(np.abs(lhs - rhs)) <= 1e-12

    @given(st.integers(0, 300), st.floats(-1, 1))
    def test_matches_scipy(self, n, x):
        assert legendre_p(n, x) == pytest.approx(eval_legendre(n, x), abs=1e-12)

    @given(st.floats(-0.9, 0.9), st.floats(1e-3, math.pi - 1e-3))
    def test_generating_function(self, x, t):
        p = legendre_table(200, math.cos(t))
        partial = np.sum(p * x ** np.arange(201))
        assert partial == pytest.approx(1 / math.sqrt(1 - 2 * x * math.cos(t) + x * x), abs=1e-8)

    @pytest.mark.parametrize("n", range(11))
    @pytest.mark.parametrize("u", [0.5, 1.5, 2.5])
    def test_mehler(self, n, u):
        # (sqrt2/pi) int_0^u cos((n+1/2) th) / sqrt(cos th - cos u) dth = P_n(cos u)
        def smooth(th):
            gap = 2 * np.sin((u + th) / 2) * np.sinc((u - th) / (2 * np.pi)) / 2
            return np.cos((n + 0.5) * th) / np.sqrt(gap)

        val = math.sqrt(2) / math.pi * integrate_sqrt_singular(smooth, 0.0, u, "right").value
        assert val == pytest.approx(legendre_p(n, math.cos(u)), abs=1e-8)

    def test_array_input(self):
        x = np.linspace(-1, 1, 7)
        np.testing.assert_allclose(legendre_p(4, x), eval_legendre(4, x), atol=1e-15)
