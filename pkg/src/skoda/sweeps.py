"""Seeded verification sweeps shared by the CLI and the acceptance tests.

Each runner returns a ``SweepResult``: summary numbers plus named checks with
the threshold that was applied, so a report never hides a tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .division import (
    DivisionProblem,
    iterated_division,
    particular_solution,
    pointwise_gap,
    skoda_divide,
    syzygy_basis,
    weighted_norm_sq,
)
from .errors import HypothesisFailed, InfeasibleError
from .hermitian import HermitianForm
from .holo import GeneratorSystem, _nonsingular, log_hessian_matrix
from .poly import MultiPoly
from .psh import PshWeight
from .quadrature import (
    Domain,
    build_grid,
    c_hat,
    g_data,
    integrate,
    log_hessian_batch,
    monomial_oracle,
    tr_omega_batch,
)
from .sampling import (
    cnormal,
    kernel_vector,
    random_generators,
    random_poly,
    random_psh,
    regular_point,
)
from .tensor_cs import (
    cs_tensor_check,
    cs_tensor_check_sesquilinear,
    cs_wedge_check,
    identity_pattern,
    random_ctensor,
    reduce_wedge_to_tensor,
    skew_identity_sides,
    wedge_sides,
)

DEFAULT_TOLERANCES = {
    "cs_slack": 1e-12,
    "cs_identity_ratio": 1e-9,
    "wedge_agreement": 1e-12,
    "skew_identity": 1e-12,
    "curvature_agreement": 1e-9,
    "curvature_nonpositive": 1e-12,
    "domination": 1e-8,
    "domination_exact": 1e-10,
    "identity_54": 1e-10,
    "variant_matrix": 1e-10,
    "monomial_oracle": 1e-9,
    "c_hat_example": 1e-6,
    "division_norm_example": 1e-4,
    "exactness": 1e-10,
    "first_order": 1e-8,
    "monotonicity": 1e-10,
    "pointwise": 1e-9,
    "bound_rtol": 1e-9,
}


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: object = None
    threshold: object = None

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "value": self.value, "threshold": self.threshold}


@dataclass
class SweepResult:
    name: str
    summary: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, passed: bool, value=None, threshold=None):
        self.checks.append(Check(name, bool(passed), value, threshold))

    def to_dict(self) -> dict:
        return {"summary": self.summary, "checks": [c.to_dict() for c in self.checks], "passed": self.passed}


def _tol(tolerances, key):
    return (tolerances or {}).get(key, DEFAULT_TOLERANCES[key])


def rel_diff(x: complex, y: complex) -> float:
    top = max(abs(x), abs(y))
    return 0.0 if top == 0 else abs(x - y) / top


# --- tensor Cauchy-Schwarz ----------------------------------------------------------


def cs_sweep(count: int = 10_000, seed: int = 0, max_dim: int = 6, tolerances=None) -> SweepResult:
    """Bilinear and sesquilinear checks on random (S, T) plus the identity pattern for every (r, n)."""
    tol = _tol(tolerances, "cs_slack")
    rtol = _tol(tolerances, "cs_identity_ratio")
    rng = np.random.default_rng(seed)
    worst = math.inf
    failures = 0
    max_ratio_excess = -math.inf
    for _ in range(count):
        r, n = (int(v) for v in rng.integers(1, max_dim + 1, 2))
        S, T = random_ctensor(rng, (r, n)), random_ctensor(rng, (r, n))
        for rep in (cs_tensor_check(S, T, 0.0, tol), cs_tensor_check_sesquilinear(S, T, tol_abs=0.0, tol_rel=tol)):
            scale = max(1.0, rep.factor * rep.rhs)
            worst = min(worst, rep.slack / scale)
            failures += not rep.holds
            if rep.rhs > 0:
                max_ratio_excess = max(max_ratio_excess, rep.ratio - rep.factor)
    ident = {}
    for r in range(1, max_dim + 1):
        for n in range(1, max_dim + 1):
            I = identity_pattern(r, n)
            ident[f"{r}x{n}"] = cs_tensor_check(I, I).ratio
    id_err = max(abs(v - min(int(k.split("x")[0]), int(k.split("x")[1]))) for k, v in ident.items())
    res = SweepResult("cs-sweep", {
        "instances": count, "checks_run": 2 * count, "failures": failures,
        "min_normalized_slack": worst, "max_ratio_minus_factor": max_ratio_excess,
        "identity_ratios": ident,
    })
    res.check("cs_inequality", failures == 0 and worst >= -tol, worst, -tol)
    res.check("identity_pattern_ratio", id_err <= rtol, id_err, rtol)
    return res


def wedge_sweep(count: int = 1000, seed: int = 0, max_p: int = 5, max_n: int = 4, tolerances=None) -> SweepResult:
    """Direct wedge sides vs the orthonormal reduction, plus the skew identity.

    Each instance is run twice: with generic c (the reduction then carries a
    normal term) and with c projected so that sum_l a_l c_{l,k} = 0, where
    the reduced tensor quantities must match with no correction.
    """
    tol = _tol(tolerances, "wedge_agreement")
    stol = _tol(tolerances, "skew_identity")
    ctol = _tol(tolerances, "cs_slack")
    rng = np.random.default_rng(seed)
    agree = skew = kernel_agree = 0.0
    max_normal = 0.0
    failures = 0
    for _ in range(count):
        p = int(rng.integers(2, max_p + 1))
        n = int(rng.integers(1, max_n + 1))
        a = random_ctensor(rng, (p, 1))[:, 0]
        b, c = random_ctensor(rng, (p, n)), random_ctensor(rng, (p, n))
        c_ker = c - np.outer(a.conj(), a @ c) / np.vdot(a, a).real
        for cc, is_kernel in ((c, False), (c_ker, True)):
            lhs, rhs, _ = wedge_sides(a, b, cc)
            red = reduce_wedge_to_tensor(a, b, cc)
            t = cs_tensor_check(red.S, red.T)
            e = max(rel_diff(lhs, red.lhs_scale * t.lhs), rel_diff(rhs, red.rhs_scale * (t.rhs + red.normal_term)))
            agree = max(agree, e)
            if is_kernel:
                kernel_agree = max(kernel_agree, rel_diff(rhs, red.rhs_scale * t.rhs), rel_diff(lhs, red.lhs_scale * t.lhs))
                max_normal = max(max_normal, red.normal_term / max(t.rhs, 1e-300))
            left, right = skew_identity_sides(a, b, cc)
            skew = max(skew, rel_diff(left, right))
            failures += not cs_wedge_check(a, b, cc, 0.0, ctol).holds
    res = SweepResult("wedge-sweep", {
        "instances": count, "max_reduction_rel_diff": agree, "max_kernel_rel_diff": kernel_agree,
        "max_kernel_normal_ratio": max_normal, "max_skew_rel_diff": skew, "inequality_failures": failures,
    })
    res.check("reduction_agreement", agree <= tol, agree, tol)
    res.check("kernel_reduction_agreement", kernel_agree <= tol, kernel_agree, tol)
    res.check("skew_identity", skew <= stol, skew, stol)
    res.check("wedge_inequality", failures == 0, failures, 0)
    return res


# --- curvature ---------------------------------------------------------------------


def curvature_family(count: int, seed: int, max_n: int = 3, max_p: int = 3, max_degree: int = 3):
    """Yield (G, z, v_frame) with 2 <= p <= max_p, 1 <= n <= max_n, z regular."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        p = int(rng.integers(2, max_p + 1))
        G = random_generators(rng, n, p, max_degree)
        z = regular_point(rng, G, floor=1e-3)
        yield G, z, cnormal(rng, (p - 1, n))


def curvature_sweep(count: int = 100, seed: int = 0, max_n: int = 3, max_p: int = 3, max_degree: int = 3,
                    tolerances=None) -> SweepResult:
    tol = _tol(tolerances, "curvature_agreement")
    ptol = _tol(tolerances, "curvature_nonpositive")
    worst = top = 0.0
    herm = 0.0
    for G, z, vf in curvature_family(count, seed, max_n, max_p, max_degree):
        kc = geo.kernel_curvature(G, z)
        a = kc.theta.value(kc.to_orthonormal(vf))
        b = geo.nakano_form_kernel_closed(G, z, geo.frame_to_ambient(kc.frame, z, vf))
        worst = max(worst, rel_diff(a, b))
        top = max(top, a, b)
        herm = max(herm, kc.theta.hermitian_defect())
    res = SweepResult("curvature-verify", {
        "instances": count, "max_rel_diff": worst, "max_value": top, "max_hermitian_defect": herm,
    })
    res.check("frame_vs_closed", worst <= tol, worst, tol)
    res.check("nonpositive", top <= ptol, top, ptol)
    return res


def dominate_sweep(count: int = 100, seed: int = 0, max_n: int = 3, max_p: int = 3, max_degree: int = 3,
                   tolerances=None) -> SweepResult:
    tol = _tol(tolerances, "domination")
    etol = _tol(tolerances, "domination_exact")
    worst = math.inf
    for G, z, _ in curvature_family(count, seed, max_n, max_p, max_degree):
        for gamma in (G.q, G.q + 0.5, G.q + 1.0):
            form = geo.twisted_domination(G, z, gamma)
            worst = min(worst, form.lambda_min / form.scale)
    z = MultiPoly.variable(1, 0)
    G = GeneratorSystem((z, MultiPoly.constant(1, 1)))
    exact = max(abs(geo.twisted_domination(G, [w], G.q).lambda_min) for w in (0, 0.3 + 0.2j, -0.9j, 2.5))
    res = SweepResult("dominate", {"instances": count, "min_scaled_lambda_min": worst, "exact_case_abs_lambda_min": exact})
    res.check("domination", worst >= -tol, worst, -tol)
    res.check("exact_case_zero", exact <= etol, exact, etol)
    return res


def identity54_sweep(count: int = 1000, seed: int = 0, max_n: int = 3, max_p: int = 3, max_degree: int = 3,
                     tolerances=None) -> SweepResult:
    tol = _tol(tolerances, "identity_54")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        p = int(rng.integers(1, max_p + 1))
        G = random_generators(rng, n, p, max_degree)
        f = random_poly(rng, n, int(rng.integers(0, max_degree + 1)))
        psi = random_psh(rng, n)
        gamma = float(rng.uniform(0.1, 3.0))
        z = regular_point(rng, G, floor=1e-3)
        worst = max(worst, geo.verify_5_4(G, f, psi, gamma, z))
    res = SweepResult("identity-54", {"instances": count, "max_rel_residual": worst})
    res.check("identity_54", worst <= tol, worst, tol)
    return res


def variants_sweep(count: int = 200, seed: int = 0, max_n: int = 3, max_p: int = 3, max_degree: int = 3,
                   tolerances=None) -> SweepResult:
    """Difference forms of variants (a) and (c), and batched vs pointwise Tr_omega for (b)."""
    tol = _tol(tolerances, "variant_matrix")
    rng = np.random.default_rng(seed)
    worst_a = worst_c = math.inf
    trace_diff = 0.0
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        p = int(rng.integers(1, max_p + 1))
        G = random_generators(rng, n, p, max_degree)
        z = regular_point(rng, G, floor=1e-3)
        fa = geo.variant_inequality_check(G, z, "a")
        worst_a = min(worst_a, fa.lambda_min / fa.scale)
        n2 = float(np.sum(np.abs(G.values(z)[0]) ** 2))
        if n2 >= 1:  # restrict variant c to |g| < 1 by shrinking the generators
            G = G.rotated(np.eye(p) * float(rng.uniform(0.1, 0.99)) / math.sqrt(n2))
        fc = geo.variant_inequality_check(G, z, "c")
        worst_c = min(worst_c, fc.lambda_min / fc.scale)
        phi = random_psh(rng, n)
        _, gv, D, s = _nonsingular(G, z)
        omega = log_hessian_matrix(gv, D, s)
        point = geo.tr_omega(HermitianForm(omega), HermitianForm(phi.hessian(z)))
        gvb, Db, sb = g_data(G, np.asarray(z)[None, :])
        batch = float(tr_omega_batch(log_hessian_batch(gvb, Db, sb), phi.hessian(np.asarray(z)[None, :]))[0])
        if math.isinf(point) or math.isinf(batch):
            trace_diff = max(trace_diff, 0.0 if point == batch else math.inf)
        else:
            trace_diff = max(trace_diff, rel_diff(point, batch))
    res = SweepResult("variants-check", {
        "instances": count, "min_scaled_lambda_min_a": worst_a, "min_scaled_lambda_min_c": worst_c,
        "max_trace_rel_diff_b": trace_diff,
    })
    res.check("variant_a_matrix", worst_a >= -tol, worst_a, -tol)
    res.check("variant_c_matrix", worst_c >= -tol, worst_c, -tol)
    res.check("variant_b_trace_consistency", trace_diff <= 1e-10, trace_diff, 1e-10)
    return res


# --- quadrature and division -----------------------------------------------------------


def skoda_example():
    """G = (z, z^2), f = z^3 in one variable."""
    z = MultiPoly.variable(1, 0)
    return GeneratorSystem((z, z * z)), z**3


def quadrature_oracles(grid=(256, 256), tolerances=None) -> SweepResult:
    tol = _tol(tolerances, "monomial_oracle")
    ctol = _tol(tolerances, "c_hat_example")
    worst = 0.0
    for R in (0.5, 1.0, 1.7):
        g = build_grid(Domain((R,)), 8, 8)
        for k in range(9):
            val = integrate(lambda pts, k=k: np.abs(pts[:, 0]) ** (2 * k), g, check_divergence=False).value
            worst = max(worst, abs(val / monomial_oracle(R, k) - 1))
    g2 = build_grid(Domain((1.0, 0.8)), 8, 8)
    prod = integrate(lambda pts: np.abs(pts[:, 0]) ** 2 * np.abs(pts[:, 1]) ** 4, g2, check_divergence=False).value
    worst = max(worst, abs(prod / (monomial_oracle(1.0, 1) * monomial_oracle(0.8, 2)) - 1))
    G, f = skoda_example()
    ch = c_hat(G, f, PshWeight(), 1.0, build_grid(Domain.unit(), *grid))
    err = abs(ch.value / (3 * math.pi / 8) - 1)
    res = SweepResult("quadrature", {"max_monomial_rel_err": worst, "c_hat": ch.to_dict(), "c_hat_rel_err": err})
    res.check("monomial_oracle", worst <= tol, worst, tol)
    res.check("c_hat_example", err <= ctol and not ch.diverged, err, ctol)
    return res


def random_division_problem(rng: np.random.Generator, grid=(8, 8), spread: float = 8.0, max_tries: int = 2000):
    """A feasible random problem with n <= 2, p <= 3 and degrees <= 3.

    f = sum_j a_j g_j for random a_j, so the ansatz degree max deg a_j is
    feasible. Systems for which max |g|^2 / min |g|^2 exceeds ``spread`` on a
    random sample of the unit polydisc or on the finest quadrature grid are
    redrawn, so the weighted integrals are finite and resolved on small grids.
    """
    for _ in range(max_tries):
        n = int(rng.integers(1, 3))
        p = int(rng.integers(1, 4))
        G = random_generators(rng, n, p, 2)
        da = int(rng.integers(0, 2))
        a = [random_poly(rng, n, da) for _ in range(p)]
        f = sum((aj * gj for aj, gj in zip(a, G.g)), MultiPoly.zero(n))
        if f.is_zero() or f.degree > 3:
            continue
        P = DivisionProblem(G, f, gamma=float(rng.uniform(0.5, 2.0)), degree=max(a_j.degree for a_j in a),
                            grid=grid)
        sample = np.sqrt(rng.random((4000, n))) * np.exp(2j * np.pi * rng.random((4000, n)))
        pts = np.concatenate([sample, P.quadrature_grid().refine().refine().nodes])
        N = np.sum(np.abs(G.values(pts)) ** 2, axis=1)
        if N.min() * spread < N.max():
            continue
        return P
    raise RuntimeError("could not draw a regular division problem")


def division_properties(count: int = 20, seed: int = 0, perturbations: int = 20, tolerances=None) -> SweepResult:
    etol = _tol(tolerances, "exactness")
    ftol = _tol(tolerances, "first_order")
    mtol = _tol(tolerances, "monotonicity")
    ptol = _tol(tolerances, "pointwise")
    rng = np.random.default_rng(seed)
    worst_res = worst_fo = worst_mono = 0.0
    worst_pert = math.inf
    worst_gap = math.inf
    bound_fail = 0
    for _ in range(count):
        P = random_division_problem(rng)
        sol = skoda_divide(P)
        scale = 1.0 + P.f.max_abs_coeff()
        worst_res = max(worst_res, sol.residual_max_coeff / scale)
        worst_fo = max(worst_fo, sol.first_order_residual)
        grid = P.quadrature_grid()
        J = weighted_norm_sq(P, sol.h, grid)
        J0 = weighted_norm_sq(P, particular_solution(P.G, P.f, P.degree), grid)
        syz = syzygy_basis(P.G, P.degree)
        rel = []
        if J0 < J:
            rel.append((J0 - J) / max(J, 1e-300))
        for _ in range(perturbations if syz else 0):
            t = cnormal(rng, len(syz)) * float(rng.uniform(1e-3, 1))
            pert = tuple(
                sol.h[j] + sum((s[j] * complex(c) for s, c in zip(syz, t)), MultiPoly.zero(P.G.n))
                for j in range(P.G.p)
            )
            rel.append((weighted_norm_sq(P, pert, grid) - J) / max(J, 1e-300))
        worst_pert = min([worst_pert, *rel]) if rel else worst_pert
        nxt = skoda_divide(DivisionProblem(P.G, P.f, P.gamma, P.psi, P.domain, P.degree + 1, grid=P.grid))
        worst_mono = max(worst_mono, nxt.weighted_norm - sol.weighted_norm)
        gap = pointwise_gap(P.G, P.f, sol.h, grid.nodes)
        fz = np.abs(P.f(grid.nodes)) ** 2 / np.sum(np.abs(P.G.values(grid.nodes)) ** 2, axis=1)
        worst_gap = min(worst_gap, float(np.min(gap / (1.0 + fz))))
        bound_fail += not sol.meets_constructive
    worst_pert = 0.0 if worst_pert == math.inf else worst_pert
    res = SweepResult("division-properties", {
        "problems": count, "max_scaled_residual": worst_res, "max_first_order": worst_fo,
        "min_perturbation_rel_gain": worst_pert, "max_degree_increase": worst_mono,
        "min_scaled_pointwise_gap": worst_gap, "constructive_bound_failures": bound_fail,
    })
    res.check("exact_residual", worst_res <= etol, worst_res, etol)
    res.check("first_order_optimality", worst_fo <= ftol, worst_fo, ftol)
    res.check("no_better_perturbation", worst_pert >= -ftol, worst_pert, -ftol)
    res.check("degree_monotonicity", worst_mono <= mtol, worst_mono, mtol)
    res.check("pointwise_minimality", worst_gap >= -ptol, worst_gap, -ptol)
    res.check("constructive_bound", bound_fail == 0, bound_fail, 0)
    return res


def iterate_examples() -> list:
    """The three skeleton examples as (label, G, f, m0, N0, expected depth)."""
    z = MultiPoly.variable(1, 0)
    z1, z2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    return [
        ("(z), z^3", GeneratorSystem((z,)), z**3, 1, 1, 2),
        ("zero f", GeneratorSystem((z,)), MultiPoly.zero(1), 1, 1, 0),
        ("(z1, z2), (z1 + z2)^3", GeneratorSystem((z1, z2)), (z1 + z2) ** 3, 1, 1, 2),
    ]


def iterate_check(tolerances=None) -> SweepResult:
    tol = _tol(tolerances, "exactness")
    res = SweepResult("iterate")
    for label, G, f, m0, N0, depth in iterate_examples():
        tree = iterated_division(G, f, m0, N0)
        r = tree.residual()
        res.summary[label] = {"depth": tree.depth, "target_depth": tree.target_depth, "residual": r,
                              "leaves": len(tree.words()), "complete": tree.complete}
        res.check(f"reexpand[{label}]", r <= tol * (1 + f.max_abs_coeff()) and tree.complete, r, tol)
        res.check(f"depth[{label}]", tree.depth == depth == tree.target_depth, tree.depth, depth)
    return res


def skoda_division_example(grid=(64, 32), tolerances=None) -> SweepResult:
    tol = _tol(tolerances, "division_norm_example")
    G, f = skoda_example()
    sol = skoda_divide(DivisionProblem(G, f, gamma=1.0, degree=2, grid=grid))
    err = abs(sol.weighted_norm / (math.pi / 2) - 1)
    res = SweepResult("skoda-example", sol.to_dict())
    res.check("exact_residual", sol.residual_max_coeff <= _tol(tolerances, "exactness") * (1 + f.max_abs_coeff()),
              sol.residual_max_coeff, _tol(tolerances, "exactness"))
    res.check("norm_pi_over_2", err <= tol, err, tol)
    res.check("meets_theorem", sol.meets_theorem, sol.weighted_norm, sol.bound_theorem)
    res.check("meets_constructive", sol.meets_constructive, sol.weighted_norm, sol.bound_constructive)
    return res


def divergent_example_flagged(grid=(64, 32)) -> bool:
    """True when G = (z, z^2), f = z^2 is rejected as a hypothesis failure."""
    G, _ = skoda_example()
    z = MultiPoly.variable(1, 0)
    try:
        skoda_divide(DivisionProblem(G, z * z, gamma=1.0, degree=2, grid=grid))
    except HypothesisFailed:
        return True
    except InfeasibleError:
        return False
    return False
