import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from skoda import geometry as geo
from skoda.errors import DomainError, PreconditionError, SingularityError
from skoda.hermitian import HermitianForm
from skoda.holo import GeneratorSystem, dbar_datum, gnorm2, log_hessian
from skoda.poly import MultiPoly
from skoda.psh import PshWeight
from skoda.sampling import cnormal, kernel_vector, random_generators, random_poly, random_psh, regular_point

seeds = st.integers(0, 2**32 - 1)
z = MultiPoly.variable(1, 0)
one = MultiPoly.constant(1, 1)


def levi_fd(u, z0, h=1e-4):
    """d_lam dbar_nu u by central differences in real coordinates (independent oracle)."""
    n = z0.size

    def e(k, imag):
        v = np.zeros(n, dtype=complex)
        v[k] = 1j * h if imag else h
        return v

    def d2(a, b):
        return (u(z0 + a + b) - u(z0 + a - b) - u(z0 - a + b) + u(z0 - a - b)) / (4 * h * h)

    out = np.empty((n, n), dtype=complex)
    for lam in range(n):
        for nu in range(n):
            xx = d2(e(lam, 0), e(nu, 0))
            yy = d2(e(lam, 1), e(nu, 1))
            xy = d2(e(lam, 0), e(nu, 1))
            yx = d2(e(lam, 1), e(nu, 0))
            out[lam, nu] = 0.25 * (xx + yy + 1j * (xy - yx))
    return out


def case(seed, pmin=1):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    p = int(rng.integers(pmin, 4))
    G = random_generators(rng, n, p, 3)
    return rng, G, regular_point(rng, G, floor=1e-2)


@given(seeds)
def test_log_hessian_matches_finite_differences(seed):
    _, G, z0 = case(seed)
    fd = levi_fd(lambda w: np.log(gnorm2(G, w)), z0)
    form = log_hessian(G, z0).matrix
    # truncation error scales with the size of the terms that cancel in the quotient
    scale = np.sum(np.abs(G.jacobian(z0)[0]) ** 2) / gnorm2(G, z0)
    assert np.abs(form - fd).max() <= 1e-5 * (1 + scale)


@given(seeds)
def test_log_hessian_methods_agree_and_are_psd(seed):
    _, G, z0 = case(seed)
    a, b = log_hessian(G, z0).matrix, log_hessian(G, z0, "wedge").matrix
    assert np.abs(a - b).max() <= 1e-10 * (1 + np.abs(a).max())
    form = log_hessian(G, z0)
    assert form.lambda_min >= -1e-10 * form.scale


def test_log_hessian_of_z_one():
    # |g|^2 = 1 + |z|^2, so d dbar log = 1 / (1 + |z|^2)^2
    G = GeneratorSystem((z, one))
    assert log_hessian(G, [0.5]).matrix[0, 0] == pytest.approx(1 / 1.25**2)


def test_singularity_error_carries_point():
    G = GeneratorSystem((z, z * z))
    with pytest.raises(SingularityError) as info:
        log_hessian(G, [0.0])
    assert info.value.point == [0j]


@given(seeds)
def test_dbar_datum_is_kernel_valued(seed):
    rng, G, z0 = case(seed)
    f = random_poly(rng, G.n, 2)
    F = dbar_datum(G, f, z0)
    assert np.abs(G.values(z0)[0] @ F).max() <= 1e-10 * (1 + np.abs(F).max())


@given(seeds)
def test_dbar_datum_matches_finite_differences(seed):
    rng, G, z0 = case(seed)
    f = random_poly(rng, G.n, 2)
    h = 1e-6
    F = dbar_datum(G, f, z0)
    for nu in range(G.n):
        e = np.zeros(G.n, dtype=complex)
        e[nu] = h

        def u(w):
            gv = G.values(w)[0]
            return gv.conj() / np.sum(np.abs(gv) ** 2)

        # dbar = (d/dx + i d/dy) / 2
        fd = ((u(z0 + e) - u(z0 - e)) + 1j * (u(z0 + 1j * e) - u(z0 - 1j * e))) / (4 * h)
        assert np.abs(f(z0) * fd - F[:, nu]).max() <= 1e-5 * (1 + np.abs(F).max())


def test_kernel_curvature_of_z_one_at_origin():
    # kernel spanned by (1, -z) with |e|^2 = 1 + |z|^2, curvature -d dbar log(1 + |z|^2) = -1 at 0
    G = GeneratorSystem((z, one))
    assert geo.nakano_form_kernel_frame(G, [0.0], [[1.0]]) == pytest.approx(-1.0)
    assert geo.nakano_form_kernel_closed(G, [0.0], [[1.0], [0.0]]) == pytest.approx(-1.0)


@given(seeds)
def test_frame_and_closed_curvature_agree(seed):
    rng, G, z0 = case(seed, pmin=2)
    vf = cnormal(rng, (G.p - 1, G.n))
    kc = geo.kernel_curvature(G, z0)
    a = kc.theta.value(kc.to_orthonormal(vf))
    b = geo.nakano_form_kernel_closed(G, z0, geo.frame_to_ambient(kc.frame, z0, vf))
    assert a == pytest.approx(b, rel=1e-8, abs=1e-12)
    assert max(a, b) <= 1e-12
    assert kc.theta.hermitian_defect() <= 1e-10 * (1 + np.abs(kc.theta.entries).max())


@given(seeds)
def test_closed_form_in_kernel_equals_simplified_form(seed):
    # for kernel vectors the closed form reduces to -|sum_{j,lam} dg_j v|^2 / |g|^2
    rng, G, z0 = case(seed, pmin=2)
    v = kernel_vector(rng, G, z0)
    D = G.jacobian(z0)[0]
    simple = -abs(np.sum(D * v)) ** 2 / gnorm2(G, z0)
    assert geo.nakano_form_kernel_closed(G, z0, v) == pytest.approx(simple, rel=1e-9, abs=1e-14)


def test_closed_form_rejects_non_kernel_vectors():
    G = GeneratorSystem((z, one))
    with pytest.raises(DomainError):
        geo.nakano_form_kernel_closed(G, [0.0], [[1.0], [1.0]])


@given(seeds, st.sampled_from([0.0, 0.5, 1.0, 3.0]))
def test_twisted_domination_is_semipositive(seed, extra):
    _, G, z0 = case(seed, pmin=2)
    form = geo.twisted_domination(G, z0, G.q + extra)
    assert form.lambda_min >= -1e-8 * form.scale


def test_twisted_domination_exact_case():
    G = GeneratorSystem((z, one))
    for w in (0.0, 0.7 - 0.2j, 3.0):
        assert abs(geo.twisted_domination(G, [w], 1).lambda_min) <= 1e-10


def test_twisted_domination_preconditions():
    G = GeneratorSystem((z, one))
    with pytest.raises(PreconditionError):
        geo.twisted_domination(G, [0.1], 0.5)
    with pytest.raises(DomainError):
        geo.twisted_domination(GeneratorSystem((z,)), [0.1], 1)


@given(seeds)
def test_identity_54(seed):
    rng, G, z0 = case(seed)
    f = random_poly(rng, G.n, 3)
    assert geo.verify_5_4(G, f, random_psh(rng, G.n), float(rng.uniform(0.1, 3)), z0) <= 1e-10


@given(seeds)
def test_fbtr_is_f_squared_omega_over_norm(seed):
    # with psi = 0 and gamma = 1 the fiber trace equals w |f|^2 omega / |g|^2
    rng, G, z0 = case(seed)
    f = random_poly(rng, G.n, 2)
    N = gnorm2(G, z0)
    got = geo.fbtr(G, f, PshWeight(), 1.0, z0).matrix
    want = abs(f(z0)) ** 2 * log_hessian(G, z0).matrix / N / N ** (G.q + 1)
    assert np.abs(got - want).max() <= 1e-10 * (1 + np.abs(want).max())


@given(seeds)
def test_variant_a_difference_closed_form(seed):
    # d dbar log(1 + N) - N/(1+N) d dbar log N = (dN)(dbar N) / (N (1 + N)^2)
    _, G, z0 = case(seed)
    N = gnorm2(G, z0)
    b = G.jacobian(z0)[0].T @ G.values(z0)[0].conj()
    want = np.outer(b, b.conj()) / (N * (1 + N) ** 2)
    got = geo.variant_inequality_check(G, z0, "a")
    assert np.abs(got.matrix - want).max() <= 1e-9 * (1 + np.abs(want).max())
    assert got.lambda_min >= -1e-10 * got.scale


@given(seeds)
def test_variant_c_difference_closed_form(seed):
    rng, G, z0 = case(seed)
    N = gnorm2(G, z0)
    G = G.rotated(np.eye(G.p) * float(rng.uniform(0.1, 0.99)) / np.sqrt(N))
    N = gnorm2(G, z0)
    L = -np.log(N)
    b = G.jacobian(z0)[0].T @ G.values(z0)[0].conj() / N
    want = np.outer(b, b.conj()) / L**2
    got = geo.variant_inequality_check(G, z0, "c")
    assert np.abs(got.matrix - want).max() <= 1e-9 * (1 + np.abs(want).max())
    assert got.lambda_min >= -1e-10 * got.scale


def test_variant_c_needs_small_g():
    with pytest.raises(PreconditionError):
        geo.variant_inequality_check(GeneratorSystem((z, one)), [0.0], "c")


@given(seeds)
def test_tr_omega_is_the_eps_limit(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    k = int(rng.integers(1, n + 1))
    X = cnormal(rng, (n, k))
    omega = HermitianForm(X @ X.conj().T)
    Y = X @ cnormal(rng, (k, k))
    A = HermitianForm(Y @ Y.conj().T)  # range inside range(omega)
    t = geo.tr_omega(A, omega)
    assert geo.tr_omega_eps(A, omega, 1e-9) == pytest.approx(t, rel=1e-5)
    if k < n:
        assert geo.tr_omega(HermitianForm(np.eye(n)), omega) == np.inf


@given(seeds)
def test_cs_type_inequality(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 5))
    X = cnormal(rng, (m, int(rng.integers(1, m + 1))))
    theta = HermitianForm(X @ X.conj().T)
    F, F2 = cnormal(rng, m), cnormal(rng, m)
    lhs, rhs = geo.cs_type_check(theta, F, F2)
    assert lhs <= rhs * (1 + 1e-9) + 1e-12
