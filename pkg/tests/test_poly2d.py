import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from markovlab.poly2d import (
    BivariatePoly,
    coeffs_allclose,
    pullback_derivative_x,
    pullback_derivative_y,
    pullback_symmetric,
)

RNG = np.random.default_rng(20260818)


def random_poly(rng, max_deg: int) -> BivariatePoly:
    c = rng.uniform(-1.0, 1.0, size=(max_deg + 1, max_deg + 1))
    i = np.arange(max_deg + 1)
    c[i[:, None] + i[None, :] > max_deg] = 0.0
    return BivariatePoly(c)


def naive_eval(p: BivariatePoly, x: float, y: float) -> float:
    if p.is_zero:
        return 0.0
    total = 0.0
    for i in range(p.coeffs.shape[0]):
        for j in range(p.coeffs.shape[1]):
            total += p.coeffs[i, j] * x**i * y**j
    return total


class TestBasics:
    def test_zero(self):
        z = BivariatePoly.zero()
        assert z.is_zero
        assert z.eval(0.3, -0.7) == 0.0
        with pytest.raises(ValueError):
            z.total_degree()

    def test_trailing_zeros_trimmed(self):
        p = BivariatePoly([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        assert p.coeffs.shape == (1, 1)
        assert p.total_degree() == 0

    def test_from_terms(self):
        p = BivariatePoly.from_terms({(2, 1): 3.0, (0, 0): -1.0})
        assert p.total_degree() == 3
        assert p.degrees() == (2, 1)
        assert p.eval(2.0, 5.0) == 3.0 * 4.0 * 5.0 - 1.0

    def test_coeffs_not_writeable(self):
        p = BivariatePoly([[1.0, 2.0]])
        with pytest.raises(ValueError):
            p.coeffs[0, 0] = 0.0

    def test_eval_vectorized(self):
        p = BivariatePoly([[1.0, 2.0], [3.0, 0.0]])  # 1 + 2y + 3x
        x = np.array([0.0, 1.0, -1.0])
        y = np.array([0.0, 0.5, 2.0])
        np.testing.assert_allclose(p.eval(x, y), 1.0 + 2.0 * y + 3.0 * x)

    def test_eval_matches_naive(self):
        for _ in range(20):
            p = random_poly(RNG, 7)
            x, y = RNG.uniform(-2.0, 2.0, size=2)
            assert p.eval(x, y) == pytest.approx(naive_eval(p, x, y), rel=1e-12, abs=1e-13)


class TestArithmetic:
    def test_partial_monomial(self):
        p = BivariatePoly.from_terms({(3, 2): 5.0})
        px = p.partial("x")
        py = p.partial("y")
        assert px.coeffs[2, 2] == 15.0
        assert py.coeffs[3, 1] == 10.0

    def test_partial_of_constant_is_zero(self):
        assert BivariatePoly([[4.0]]).partial("x").is_zero

    def test_multiply_matches_pointwise(self):
        for _ in range(10):
            a = random_poly(RNG, 4)
            b = random_poly(RNG, 5)
            prod = a * b
            x, y = RNG.uniform(-1.5, 1.5, size=2)
            assert prod.eval(x, y) == pytest.approx(
                a.eval(x, y) * b.eval(x, y), rel=1e-12, abs=1e-13
            )

    def test_add_sub_scale(self):
        a = random_poly(RNG, 3)
        b = random_poly(RNG, 3)
        x, y = 0.37, -1.21
        assert (a + b).eval(x, y) == pytest.approx(a.eval(x, y) + b.eval(x, y))
        assert (a - b).eval(x, y) == pytest.approx(a.eval(x, y) - b.eval(x, y))
        assert a.scale(-2.5).eval(x, y) == pytest.approx(-2.5 * a.eval(x, y))
        assert (a - a).is_zero

    def test_coeffs_allclose_scale_invariant(self):
        a = random_poly(RNG, 4)
        b = BivariatePoly(a.coeffs * (1.0 + 1e-14))
        assert coeffs_allclose(a, b)
        assert not coeffs_allclose(a, a.scale(1.0 + 1e-6))


coords = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


class TestPullback:
    """The symmetric substitution x = u+v, y = uv and its derivative rules."""

    def test_x_becomes_u_plus_v(self):
        q = pullback_symmetric(BivariatePoly.from_terms({(1, 0): 1.0}))
        assert q.eval(0.3, 0.9) == pytest.approx(1.2)

    def test_y_becomes_uv(self):
        q = pullback_symmetric(BivariatePoly.from_terms({(0, 1): 1.0}))
        assert q.eval(0.3, 0.9) == pytest.approx(0.27)

    @given(u=coords, v=coords)
    def test_pullback_is_composition(self, u, v):
        p = BivariatePoly.from_terms({(2, 1): 1.0, (1, 0): -0.5, (0, 2): 2.0})
        q = pullback_symmetric(p)
        assert q.eval(u, v) == pytest.approx(p.eval(u + v, u * v), rel=1e-12, abs=1e-12)

    def test_derivative_identity_y(self):
        # (d/du - d/dv) of P(u+v, uv) equals (v-u) * (dP/dy)(u+v, uv)
        vmu = BivariatePoly([[0.0, 1.0], [-1.0, 0.0]])
        for _ in range(30):
            p = random_poly(RNG, 6)
            lhs = pullback_derivative_y(p)
            rhs = vmu * pullback_symmetric(p.partial("y"))
            assert coeffs_allclose(lhs, rhs)

    def test_derivative_identity_x(self):
        # d(vQ)/dv - d(uQ)/du with Q = P(u+v, uv) equals (v-u) * (dP/dx)(u+v, uv)
        vmu = BivariatePoly([[0.0, 1.0], [-1.0, 0.0]])
        for _ in range(30):
            p = random_poly(RNG, 6)
            lhs = pullback_derivative_x(p)
            rhs = vmu * pullback_symmetric(p.partial("x"))
            assert coeffs_allclose(lhs, rhs)

    def test_derivative_identity_pointwise(self):
        p = random_poly(RNG, 5)
        lhs = pullback_derivative_y(p)
        for _ in range(10):
            u, v = RNG.uniform(-1.0, 1.0, size=2)
            expect = (v - u) * p.partial("y").eval(u + v, u * v)
            assert lhs.eval(u, v) == pytest.approx(expect, rel=1e-11, abs=1e-12)
