import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given
from hypothesis import strategies as st

from skoda.errors import DomainError, HypothesisFailed, PreconditionError
from skoda.holo import GeneratorSystem
from skoda.poly import MultiPoly
from skoda.psh import PshWeight
from skoda.quadrature import (
    Domain,
    bound_constant,
    build_grid,
    c_hat,
    divergence_flag,
    integrate,
    monomial_oracle,
    require_finite,
)

z = MultiPoly.variable(1, 0)
G_EX = GeneratorSystem((z, z * z))


def radial_oracle(fn, R=1.0):
    """pi * int_0^{R^2} fn(s) ds for a radial density fn(|z|^2), by adaptive quadrature."""
    return math.pi * scipy.integrate.quad(fn, 0.0, R * R, epsabs=1e-14, epsrel=1e-13)[0]


def ones(pts):
    return np.ones(len(pts))


@given(st.floats(0.1, 5.0), st.integers(1, 3), st.integers(2, 12), st.integers(2, 12))
def test_weights_sum_to_volume(R, n, radial, angular):
    g = build_grid(Domain((R,) * n), radial, angular)
    assert g.size == (radial * angular) ** n
    assert g.weights.sum() == pytest.approx((math.pi * R * R) ** n, rel=1e-10)
    assert np.all(g.weights > 0)
    assert np.all(np.abs(g.nodes) < R)


def test_unit_disc_area_and_second_moment():
    g = build_grid(Domain.unit(), 16, 16)
    assert integrate(ones, g).value == pytest.approx(math.pi, rel=1e-10)
    assert integrate(lambda p: np.abs(p[:, 0]) ** 2, g).value == pytest.approx(math.pi / 2, rel=1e-10)


@pytest.mark.parametrize("k", range(9))
@pytest.mark.parametrize("R", [0.3, 1.0, 2.0])
def test_monomial_oracle(k, R):
    g = build_grid(Domain((R,)), 8, 4)
    val = integrate(lambda p: np.abs(p[:, 0]) ** (2 * k), g, check_divergence=False).value
    assert val == pytest.approx(monomial_oracle(R, k), rel=1e-9)


def test_bidisc_product_of_monomials():
    g = build_grid(Domain((1.0, 1.0)), 6, 6)
    val = integrate(lambda p: np.abs(p[:, 0]) ** 2 * np.abs(p[:, 1]) ** 4, g).value
    assert val == pytest.approx((math.pi / 2) * (math.pi / 3), rel=1e-10)


def test_off_center_disc():
    # |z - c|^2 integrates like |w|^2 on the disc around c
    d = Domain((0.5,), (1 + 1j,))
    g = build_grid(d, 8, 8)
    val = integrate(lambda p: np.abs(p[:, 0] - (1 + 1j)) ** 2, g).value
    assert val == pytest.approx(monomial_oracle(0.5, 1), rel=1e-10)


def test_smooth_integrand_is_refinement_stable():
    g = build_grid(Domain.unit(), 32, 16)
    res = integrate(lambda p: 1 / (1 + np.abs(p[:, 0]) ** 2) ** 3, g)
    assert not res.diverged
    v1, v2 = res.levels[:2]
    assert abs(v2 - v1) <= 1e-8 * abs(v1)
    assert v1 == pytest.approx(radial_oracle(lambda s: 1 / (1 + s) ** 3), rel=1e-12)


def test_log_divergent_density_is_flagged():
    g = build_grid(Domain.unit(), 16, 16)
    assert integrate(lambda p: 1 / np.abs(p[:, 0]) ** 2, g).diverged


def test_integrable_singularity_is_not_flagged():
    # 1/|z| is integrable on the disc (value 2 pi)
    g = build_grid(Domain.unit(), 64, 8)
    res = integrate(lambda p: 1 / np.abs(p[:, 0]), g)
    assert not res.diverged


def test_skipped_nodes_are_reported():
    g = build_grid(Domain.unit(), 4, 4)
    res = integrate(lambda p: np.where(np.real(p[:, 0]) > 0, np.nan, 1.0), g, check_divergence=False)
    assert res.skipped_nodes > 0
    assert res.value + res.skipped_weight == pytest.approx(math.pi)


def test_summation_is_deterministic():
    g = build_grid(Domain((1.0, 1.0)), 6, 6)
    dens = lambda p: np.exp(np.real(p[:, 0] * p[:, 1]))  # noqa: E731
    assert integrate(dens, g).value == integrate(dens, build_grid(Domain((1.0, 1.0)), 6, 6)).value


@given(st.lists(st.floats(0.5, 2.0), min_size=3, max_size=3))
def test_divergence_flag_on_converging_sequences(base):
    # geometric convergence with ratio <= 1/2 is never flagged
    a = base[0]
    levels = [a, a + 1e-3, a + 1e-3 + 4e-4]
    assert not divergence_flag(levels)
    assert divergence_flag([a, 2 * a, 4 * a])
    assert divergence_flag([a, a + 0.1, a + 0.2])


def test_grid_validation():
    with pytest.raises(DomainError):
        build_grid(Domain.unit(), 1, 8)
    with pytest.raises(DomainError):
        Domain((0.0,))
    with pytest.raises(DomainError):
        Domain((1.0,), kind="ball")


def test_c_hat_example():
    res = c_hat(G_EX, z**3, PshWeight(), 1.0, build_grid(Domain.unit(), 64, 16))
    assert not res.diverged
    oracle = radial_oracle(lambda s: 1 / (1 + s) ** 3)
    assert res.value == pytest.approx(oracle, rel=1e-10)
    assert res.value == pytest.approx(3 * math.pi / 8, rel=1e-10)


def test_c_hat_zero_f():
    res = c_hat(G_EX, MultiPoly.zero(1), PshWeight(), 1.0, build_grid(Domain.unit(), 8, 8))
    assert res.value == 0 and not res.diverged


def test_c_hat_borderline_diverges():
    res = c_hat(G_EX, z * z, PshWeight(), 1.0, build_grid(Domain.unit(), 64, 16))
    assert res.diverged
    with pytest.raises(HypothesisFailed):
        require_finite(res, "C_hat")


def test_c1_matches_radial_oracle():
    # q = 1: |z|^6 (N + 1 + N) / (N^3 (1 + N)) with N = s (1 + s)
    g = build_grid(Domain.unit(), 64, 8)
    res = bound_constant(G_EX, z**3, PshWeight(), g, variant="a")
    def fn(s):
        N = s * (1 + s)
        return s**3 * (2 * N + 1) / (N**3 * (1 + N))
    assert res.value == pytest.approx(radial_oracle(fn), rel=1e-9)


def test_c2_with_euclidean_phi():
    # phi = |z|^2: omega = 1, Tr_omega d dbar log N = 1/(1 + s)^2
    g = build_grid(Domain.unit(), 64, 8)
    res = bound_constant(G_EX, z**3, PshWeight(), g, variant="b", phi=PshWeight(c1=1.0))
    def fn(s):
        N = s * (1 + s)
        return s**3 * (1 + 1 / (1 + s) ** 2) * math.exp(-s) / N**2
    assert not res.diverged
    assert res.value == pytest.approx(radial_oracle(fn), rel=1e-9)


def test_c3_matches_radial_oracle():
    R = 0.7
    g = build_grid(Domain((R,)), 64, 8)
    res = bound_constant(G_EX, z**3, PshWeight(), g, variant="c")
    def fn(s):
        N = s * (1 + s)
        L = -math.log(N)
        return s**3 * (L + L * L) / N**2
    assert res.value == pytest.approx(radial_oracle(fn, R), rel=1e-6)


def test_c3_precondition():
    with pytest.raises(PreconditionError):
        bound_constant(G_EX, z**3, PshWeight(), build_grid(Domain.unit(), 8, 8), variant="c")


def test_variant_b_needs_phi():
    with pytest.raises(PreconditionError):
        bound_constant(G_EX, z**3, PshWeight(), build_grid(Domain.unit(), 8, 8), variant="b")
