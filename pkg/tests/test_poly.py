import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from skoda.errors import DomainError, ShapeError
from skoda.poly import BiPoly, MultiPoly, monomials
from skoda.sampling import random_poly

seeds = st.integers(0, 2**32 - 1)


def test_monomials_graded_count():
    # number of monomials of degree <= d in n variables is C(n + d, d)
    from math import comb

    for n in range(1, 4):
        for d in range(5):
            exps = monomials(n, d)
            assert len(exps) == comb(n + d, d)
            assert [sum(e) for e in exps] == sorted(sum(e) for e in exps)


def test_literal_round_trip():
    lit = [{"coeff": [1.0, -2.0], "exps": [2, 0]}, {"coeff": 3, "exps": [0, 1]}]
    p = MultiPoly.from_terms(lit)
    assert p.nvars == 2
    assert MultiPoly.from_terms(p.to_terms()) == p
    assert p([1.0, 2.0]) == pytest.approx((1 - 2j) + 6)


def test_zero_and_degree():
    z = MultiPoly.zero(2)
    assert z.is_zero() and z.degree == -1
    assert (MultiPoly.variable(2, 1) ** 3).degree == 3


def test_bad_inputs():
    with pytest.raises(DomainError):
        MultiPoly(0)
    with pytest.raises(ShapeError):
        MultiPoly.variable(2, 0)([1.0, 2.0, 3.0])


@given(seeds)
def test_evaluation_is_a_ring_homomorphism(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    p, q = random_poly(rng, n, 3), random_poly(rng, n, 2)
    pts = rng.normal(size=(5, n)) + 1j * rng.normal(size=(5, n))
    np.testing.assert_allclose((p * q)(pts), p(pts) * q(pts), rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose((p - q)(pts), p(pts) - q(pts), rtol=1e-12, atol=1e-12)


@given(seeds)
def test_partial_matches_complex_difference(seed):
    # for holomorphic p, dp/dz_l is the complex difference quotient along z_l
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    p = random_poly(rng, n, 3)
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    l = int(rng.integers(n))
    h = 1e-6
    e = np.zeros(n, dtype=complex)
    e[l] = h
    fd = (p(z + e) - p(z - e)) / (2 * h)
    assert abs(p.partial(l)(z) - fd) <= 1e-6 * (1 + abs(fd))


@given(seeds)
def test_bipoly_derivatives_are_leibniz(seed):
    rng = np.random.default_rng(seed)
    a, b = random_poly(rng, 2, 2), random_poly(rng, 2, 2)
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    bp = BiPoly.product(a, b)
    assert bp(z) == pytest.approx(a(z) * np.conj(b(z)))
    assert bp.d(0)(z) == pytest.approx(a.partial(0)(z) * np.conj(b(z)))
    assert bp.dbar(1)(z) == pytest.approx(a(z) * np.conj(b.partial(1)(z)))
