"""Polynomial division f = sum_j h_j g_j with weighted L^2 control.

Feasibility and the affine solution set come from coefficient linear
algebra at a fixed ansatz degree d: the map (h_1, ..., h_p) -> sum h_j g_j
is a matrix on coefficient vectors, its null space gives the syzygies and a
least-squares solve gives a particular solution. The weighted norm is then
minimized over that affine set using the quadrature Gram form.

Some directions of the affine set have infinite weighted norm (the example
G = (z, z^2) has syzygy (z, -1), whose norm diverges at 0). Those are
detected by refining the grid, as for scalar integrals, and excluded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DomainError, HypothesisFailed, InfeasibleError
from .holo import GeneratorSystem
from .poly import MultiPoly, monomial_matrix, monomials
from .psh import PshWeight
from .quadrature import (
    CHUNK,
    Domain,
    IntegralResult,
    QuadratureGrid,
    VARIANTS,
    bound_constant,
    build_grid,
    divergence_flag,
    integrate,
    norm_weight,
)

FEAS_REL = 1e-10
GRAM_REL = 1e-10
FREEZE_FACTOR = 1e12
BOUND_RTOL = 1e-9


# --- coefficient linear algebra ----------------------------------------------------


@dataclass(frozen=True)
class CoefficientMap:
    """Matrix of (h_1, ..., h_p) -> sum h_j g_j on coefficients of degree <= d.

    Column index is j * len(in_exps) + (position of the exponent in in_exps).
    """

    G: GeneratorSystem
    degree: int
    in_exps: tuple
    out_exps: tuple
    matrix: np.ndarray

    def unpack(self, x: np.ndarray) -> tuple:
        m = len(self.in_exps)
        return tuple(MultiPoly.from_coeffs(self.G.n, self.in_exps, x[j * m:(j + 1) * m]) for j in range(self.G.p))

    def pack(self, h) -> np.ndarray:
        return np.concatenate([hj.coeffs(self.in_exps) for hj in h])


def coefficient_map(G: GeneratorSystem, d: int, extra=()) -> CoefficientMap:
    if d < 0:
        raise DomainError(f"ansatz degree must be >= 0, got {d}")
    in_exps = monomials(G.n, d)
    out = set(monomials(G.n, d + max(gj.degree for gj in G.g)))
    out.update(tuple(e) for e in extra)
    out_exps = tuple(sorted(out, key=lambda e: (sum(e), e)))
    row = {e: i for i, e in enumerate(out_exps)}
    A = np.zeros((len(out_exps), G.p * len(in_exps)), dtype=complex)
    for j, gj in enumerate(G.g):
        for k, e in enumerate(in_exps):
            col = j * len(in_exps) + k
            for ge, c in gj.terms.items():
                A[row[tuple(a + b for a, b in zip(e, ge))], col] += c
    return CoefficientMap(G, d, in_exps, out_exps, A)


def contract(G: GeneratorSystem, h) -> MultiPoly:
    """sum_j h_j g_j as a polynomial."""
    return sum((hj * gj for hj, gj in zip(h, G.g)), MultiPoly.zero(G.n))


def residual_max_coeff(G: GeneratorSystem, f: MultiPoly, h) -> float:
    return (f - contract(G, h)).max_abs_coeff()


def exactness_tol(f: MultiPoly) -> float:
    return FEAS_REL * (1.0 + f.max_abs_coeff())


def _chop_tuple(h, rel: float = 1e-14) -> tuple:
    top = max((hj.max_abs_coeff() for hj in h), default=0.0)
    return tuple(hj.chop(rel * top) for hj in h)


def syzygy_basis(G: GeneratorSystem, d: int) -> list:
    """Basis of {(s_1, ..., s_p) : sum s_j g_j = 0, deg s_j <= d}.

    The null space is brought to reduced echelon form on pivot columns chosen
    by pivoted QR, so simple relations such as (z_2, -z_1) come out sparse.
    """
    cm = coefficient_map(G, d)
    N = scipy.linalg.null_space(cm.matrix)
    k = N.shape[1]
    if k == 0:
        return []
    B = N.T
    _, _, piv = scipy.linalg.qr(B, pivoting=True, mode="economic")
    R = np.linalg.solve(B[:, piv[:k]], B)
    return [_chop_tuple(cm.unpack(R[i])) for i in range(k)]


def particular_solution(G: GeneratorSystem, f: MultiPoly, d: int) -> tuple:
    """Some (h_1, ..., h_p) of degree <= d with sum h_j g_j = f.

    Raises InfeasibleError carrying the least-squares residual when f is not
    in the degree-d truncation of the ideal.
    """
    if f.nvars != G.n:
        raise DomainError(f"f has {f.nvars} variables, generators have {G.n}")
    cm = coefficient_map(G, d, f.terms.keys())
    b = f.coeffs(cm.out_exps)
    x, *_ = np.linalg.lstsq(cm.matrix, b, rcond=None)
    res = float(np.abs(cm.matrix @ x - b).max()) if b.size else 0.0
    tol = exactness_tol(f)
    if res > tol:
        raise InfeasibleError(f"f is not in the ideal at degree {d} (coefficient residual {res:.3e})", res)
    h = _chop_tuple(cm.unpack(x))
    if residual_max_coeff(G, f, h) > tol:
        h = cm.unpack(x)
    return h


# --- problem and solution ------------------------------------------------------------


@dataclass(frozen=True)
class DivisionProblem:
    G: GeneratorSystem
    f: MultiPoly
    gamma: float = 1.0
    psi: PshWeight = field(default_factory=PshWeight)
    domain: Domain | None = None
    degree: int = 2
    variant: str = "skoda"
    phi: PshWeight | None = None
    grid: tuple = (64, 32)

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError(f"gamma must be > 0, got {self.gamma}")
        if self.variant not in VARIANTS:
            raise DomainError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.f.nvars != self.G.n:
            raise DomainError(f"f has {self.f.nvars} variables, generators have {self.G.n}")
        if self.domain is None:
            object.__setattr__(self, "domain", Domain.unit(self.G.n))
        if self.domain.n != self.G.n:
            raise DomainError(f"domain has {self.domain.n} coordinates, generators use {self.G.n}")
        if self.degree < 0:
            raise DomainError(f"ansatz degree must be >= 0, got {self.degree}")
        object.__setattr__(self, "grid", tuple(int(v) for v in self.grid))

    @property
    def q(self) -> int:
        return self.G.q

    @property
    def factor(self) -> float:
        """(1 + q/gamma) for Skoda's theorem; 1 for the variants."""
        return 1.0 + self.q / self.gamma if self.variant == "skoda" else 1.0

    def quadrature_grid(self) -> QuadratureGrid:
        return build_grid(self.domain, *self.grid)

    def weight(self):
        return norm_weight(self.G, self.psi, self.gamma, self.variant, self.phi)


@dataclass(frozen=True)
class DivisionSolution:
    """Minimizer found at the ansatz degree with its bound bookkeeping.

    For Skoda's theorem ``constant`` is C_hat, ``bound_theorem`` is
    (1 + q/gamma) C_hat and ``bound_constructive`` is twice that. For the
    variants both bounds equal 2 C_i.
    """

    h: tuple
    residual_max_coeff: float
    constant: float
    weighted_norm: float
    bound_theorem: float
    bound_constructive: float
    meets_theorem: bool
    meets_constructive: bool
    variant: str = "skoda"
    degree: int = 0
    n_syzygies: int = 0
    frozen: int = 0
    divergent_directions: int = 0
    first_order_residual: float = 0.0
    constant_levels: tuple = ()
    norm_levels: tuple = ()
    norm_diverged: bool = False
    skipped_nodes: int = 0
    skipped_weight: float = 0.0

    @property
    def C_hat(self) -> float:
        return self.constant

    @property
    def ratio(self) -> float:
        """weighted_norm / bound_theorem (nan when the bound vanishes)."""
        return self.weighted_norm / self.bound_theorem if self.bound_theorem > 0 else float("nan")

    def to_dict(self) -> dict:
        return {
            "h": [hj.to_terms() for hj in self.h],
            "residual_max_coeff": self.residual_max_coeff,
            "constant": self.constant,
            "weighted_norm": self.weighted_norm,
            "bound_theorem": self.bound_theorem,
            "bound_constructive": self.bound_constructive,
            "meets_theorem": self.meets_theorem,
            "meets_constructive": self.meets_constructive,
            "ratio": self.ratio,
            "variant": self.variant,
            "degree": self.degree,
            "n_syzygies": self.n_syzygies,
            "frozen": self.frozen,
            "divergent_directions": self.divergent_directions,
            "first_order_residual": self.first_order_residual,
            "constant_levels": list(self.constant_levels),
            "norm_levels": list(self.norm_levels),
            "norm_diverged": self.norm_diverged,
            "skipped_nodes": self.skipped_nodes,
            "skipped_weight": self.skipped_weight,
        }


def _leq(a: float, b: float) -> bool:
    return bool(a <= b * (1 + BOUND_RTOL))


def coefficient_gram(exps, weight, grid: QuadratureGrid) -> np.ndarray:
    """Gamma[a, b] = sum_nodes w conj(z^a) z^b over the grid; skipped nodes contribute 0."""
    m = len(exps)
    out = np.zeros((m, m), dtype=complex)
    for start in range(0, grid.size, CHUNK):
        stop = min(start + CHUNK, grid.size)
        pts = grid.nodes[start:stop]
        w = np.asarray(weight(pts), dtype=float) * grid.weights[start:stop]
        w = np.where(np.isfinite(w), w, 0.0)
        V = monomial_matrix(pts, exps)
        out += V.conj().T @ (w[:, None] * V)
    return 0.5 * (out + out.conj().T)


def _basis_gram(coeffs: np.ndarray, gamma_c: np.ndarray, p: int) -> np.ndarray:
    """Gram of the tuples whose stacked coefficient vectors are the columns of coeffs."""
    m = gamma_c.shape[0]
    C = coeffs.reshape(p, m, -1)
    out = sum(C[j].conj().T @ gamma_c @ C[j] for j in range(p))
    return 0.5 * (out + out.conj().T)


def weighted_norm_sq(P: DivisionProblem, h, grid: QuadratureGrid | None = None) -> float:
    """sum_j int |h_j|^2 w on a single grid (no divergence check)."""
    grid = grid or P.quadrature_grid()
    exps = monomials(P.G.n, max(max(hj.degree for hj in h), 0))
    gam = coefficient_gram(exps, P.weight(), grid)
    x = np.concatenate([hj.coeffs(exps) for hj in h])[:, None]
    return float(np.real(_basis_gram(x, gam, P.G.p))[0, 0])


def _norm_integral(P: DivisionProblem, h, grid: QuadratureGrid) -> IntegralResult:
    w = P.weight()

    def dens(pts):
        return w(pts) * sum(np.abs(hj(pts)) ** 2 for hj in h)

    return integrate(dens, grid)


@dataclass
class _Minimizer:
    x: np.ndarray  # coefficients over the basis (h0, s_1, ..., s_k)
    frozen: int
    divergent: int
    first_order: float


def _minimize(basis: np.ndarray, grams: list, p: int) -> _Minimizer:
    """Minimize the norm of basis @ x subject to x[0] = 1 over non-divergent directions.

    ``grams`` holds the coefficient Gram matrices on grids m, 2m, 4m.
    """
    k1 = basis.shape[1]
    G1, G2, G4 = (_basis_gram(basis, g, p) for g in grams)
    diag = np.real(np.diag(G1))
    active = np.ones(k1, dtype=bool)
    if k1 > 1:
        med = float(np.median(diag[1:]))
        active[1:] = ~(diag[1:] > FREEZE_FACTOR * max(med, np.finfo(float).tiny))
    frozen = int(np.sum(~active))
    idx = np.flatnonzero(active)
    scale = 1.0 / np.sqrt(np.where(diag[idx] > 0, diag[idx], 1.0))
    S = np.diag(scale)
    A1, A2, A4 = (S @ g[np.ix_(idx, idx)] @ S for g in (G1, G2, G4))
    lam, V = np.linalg.eigh(A1)
    keep = lam > GRAM_REL * lam.max() if lam.size and lam.max() > 0 else np.zeros(lam.shape, dtype=bool)
    Wh = V[:, keep] / np.sqrt(lam[keep])
    delta = Wh.conj().T @ (A2 - A1) @ Wh
    _, Y = np.linalg.eigh(0.5 * (delta + delta.conj().T))
    dirs = Wh @ Y  # columns are A1-orthonormal
    conv = []
    for i in range(dirs.shape[1]):
        c = dirs[:, i]
        levels = [float(np.real(np.vdot(c, A @ c))) for A in (A1, A2, A4)]
        conv.append(not divergence_flag(levels))
    conv = np.array(conv, dtype=bool)
    W = dirs[:, conv]
    w0 = W[0, :] * scale[0]  # h0 is never frozen, so idx[0] == 0
    nw = float(np.linalg.norm(w0))
    if nw < 1e-12 * max(1.0, float(np.abs(dirs).max())):
        raise InfeasibleError("no solution of finite weighted norm at this degree")
    y = w0.conj() / nw**2
    xs = W @ y
    x = np.zeros(k1, dtype=complex)
    x[idx] = scale * xs
    # first-order optimality over tangent directions {W t : w0 . t = 0}
    T = scipy.linalg.null_space(w0[None, :]) if W.shape[1] > 1 else np.zeros((W.shape[1], 0))
    fo = 0.0
    if T.size:
        J = float(np.real(np.vdot(xs, A1 @ xs)))
        grads = (W @ T).conj().T @ A1 @ xs
        fo = float(np.abs(grads).max() / math.sqrt(J)) if J > 0 else 0.0
    return _Minimizer(x, frozen, int(np.sum(~conv)), fo)


def _zero_solution(P: DivisionProblem, const: IntegralResult | None) -> DivisionSolution:
    zero = tuple(MultiPoly.zero(P.G.n) for _ in range(P.G.p))
    c = const.value if const else 0.0
    bt = P.factor * c if P.variant == "skoda" else 2 * c
    bc = 2 * P.factor * c if P.variant == "skoda" else 2 * c
    return DivisionSolution(zero, 0.0, c, 0.0, bt, bc, True, True, P.variant, P.degree,
                            constant_levels=const.levels if const else ())


def skoda_divide(P: DivisionProblem) -> DivisionSolution:
    """Minimal-norm division at degree P.degree with the bound constants of P.variant."""
    grid = P.quadrature_grid()
    const = bound_constant(P.G, P.f, P.psi, grid, P.gamma, P.variant, P.phi)
    name = "C_hat" if P.variant == "skoda" else f"C({P.variant})"
    if const.diverged:
        raise HypothesisFailed(f"{name} appears to diverge (refinement values {const.levels})", const.levels)
    if P.f.is_zero():
        return _zero_solution(P, const)
    G = P.G
    h0 = particular_solution(G, P.f, P.degree)
    syz = syzygy_basis(G, P.degree)
    cm_exps = monomials(G.n, P.degree)
    basis = np.stack([np.concatenate([hj.coeffs(cm_exps) for hj in t]) for t in [h0, *syz]], axis=1)
    w = P.weight()
    grams = [coefficient_gram(cm_exps, w, grid), coefficient_gram(cm_exps, w, grid.refine()),
             coefficient_gram(cm_exps, w, grid.refine().refine())]
    mz = _minimize(basis, grams, G.p)
    x = basis @ mz.x
    m = len(cm_exps)
    h = tuple(MultiPoly.from_coeffs(G.n, cm_exps, x[j * m:(j + 1) * m]) for j in range(G.p))
    hc = _chop_tuple(h, 1e-13)
    tol = exactness_tol(P.f)
    if residual_max_coeff(G, P.f, hc) <= tol:
        h = hc
    res = residual_max_coeff(G, P.f, h)
    if res > tol:
        raise InfeasibleError(f"minimizer lost exactness (coefficient residual {res:.3e})", res)
    nrm = _norm_integral(P, h, grid)
    c = const.value
    if P.variant == "skoda":
        bt, bc = P.factor * c, 2 * P.factor * c
    else:
        bt = bc = 2 * c
    ok = not nrm.diverged
    return DivisionSolution(
        h=h,
        residual_max_coeff=res,
        constant=c,
        weighted_norm=nrm.value,
        bound_theorem=bt,
        bound_constructive=bc,
        meets_theorem=ok and _leq(nrm.value, bt),
        meets_constructive=ok and _leq(nrm.value, bc),
        variant=P.variant,
        degree=P.degree,
        n_syzygies=len(syz),
        frozen=mz.frozen,
        divergent_directions=mz.divergent,
        first_order_residual=mz.first_order,
        constant_levels=const.levels,
        norm_levels=nrm.levels,
        norm_diverged=nrm.diverged,
        skipped_nodes=const.skipped_nodes,
        skipped_weight=const.skipped_weight,
    )


def variant_divide(P: DivisionProblem) -> DivisionSolution:
    if P.variant == "skoda":
        raise DomainError("variant_divide needs variant a, b or c")
    return skoda_divide(P)


# --- diagnostics -------------------------------------------------------------------


def first_order_residual(P: DivisionProblem, h, directions, grid: QuadratureGrid | None = None) -> float:
    """max_i |<h, s_i>| / sqrt(<s_i, s_i> <h, h>) on the grid's Gram form."""
    if not directions:
        return 0.0
    grid = grid or P.quadrature_grid()
    deg = max(max(t.degree for t in tup) for tup in [h, *directions])
    exps = monomials(P.G.n, max(deg, 0))
    gam = coefficient_gram(exps, P.weight(), grid)
    cols = np.stack([np.concatenate([t.coeffs(exps) for t in tup]) for tup in [h, *directions]], axis=1)
    Gm = _basis_gram(cols, gam, P.G.p)
    J = float(np.real(Gm[0, 0]))
    d = np.real(np.diag(Gm))[1:]
    if J <= 0:
        return 0.0
    return float(np.max(np.abs(Gm[1:, 0]) / np.sqrt(np.where(d > 0, d, 1.0) * J)))


def pointwise_gap(G: GeneratorSystem, f: MultiPoly, h, points) -> np.ndarray:
    """sum_j |h_j|^2 - |f|^2 / |g|^2 at each point (nonnegative for any exact solution)."""
    gv = G.values(points)
    n2 = np.sum(np.abs(gv) ** 2, axis=1)
    hs = sum(np.abs(hj(points)) ** 2 for hj in h)
    return hs - np.abs(f(points)) ** 2 / n2


# --- iterated division -------------------------------------------------------------


@dataclass(frozen=True)
class ExpansionNode:
    """poly = sum_j g_j * children[j].poly when children is non-empty."""

    poly: MultiPoly
    budget: int
    children: tuple = ()
    diagnostic: str | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def depth(self) -> int:
        return 0 if self.is_leaf else 1 + max(c.depth() for c in self.children)


@dataclass(frozen=True)
class ExpansionTree:
    G: GeneratorSystem
    f: MultiPoly
    m0: int
    N0: int
    root: ExpansionNode | None
    target_depth: int

    @property
    def depth(self) -> int:
        return 0 if self.root is None else self.root.depth()

    @property
    def complete(self) -> bool:
        return self.root is None or not any(n.diagnostic for n in self.nodes())

    def nodes(self):
        stack = [self.root] if self.root else []
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children)

    def expand(self) -> MultiPoly:
        """Recursive re-expansion sum_j g_j * expand(child_j)."""
        def rec(node):
            if node.is_leaf:
                return node.poly
            return contract(self.G, [rec(c) for c in node.children])

        return MultiPoly.zero(self.G.n) if self.root is None else rec(self.root)

    def words(self) -> list:
        """Flattened form: (index word (j_1, ..., j_l), leaf coefficient) pairs."""
        out = []

        def rec(node, word):
            if node.is_leaf:
                out.append((word, node.poly))
            else:
                for j, c in enumerate(node.children):
                    rec(c, word + (j,))

        if self.root is not None:
            rec(self.root, ())
        return out

    def expand_flat(self) -> MultiPoly:
        """sum over words of g_{j_1} ... g_{j_l} * coefficient."""
        total = MultiPoly.zero(self.G.n)
        for word, coeff in self.words():
            term = coeff
            for j in word:
                term = term * self.G.g[j]
            total = total + term
        return total

    def residual(self) -> float:
        return max((self.f - self.expand()).max_abs_coeff(), (self.f - self.expand_flat()).max_abs_coeff())


def iteration_depth(m: int, m0: int, N0: int) -> int:
    """Largest l >= 0 with m - l*m0 >= N0 (0 if none)."""
    if m0 < 1:
        raise DomainError(f"m0 must be >= 1, got {m0}")
    return max(0, (m - N0) // m0) if m >= N0 else 0


def iterated_division(G: GeneratorSystem, f: MultiPoly, m0: int, N0: int) -> ExpansionTree:
    """Divide f, then each quotient, while the degree budget stays >= N0 after the step.

    The root has budget m = deg f; a node with budget b is divided at ansatz
    degree b - m0 when b - m0 >= N0. A failed stage becomes a leaf carrying a
    diagnostic, so the tree is partial but still re-expands to f.
    """
    target = iteration_depth(max(f.degree, 0), m0, N0)
    if f.is_zero():
        return ExpansionTree(G, f, m0, N0, None, 0)

    def build(s: MultiPoly, b: int) -> ExpansionNode:
        d = b - m0
        if d < N0:
            return ExpansionNode(s, b)
        try:
            h = particular_solution(G, s, d)
        except InfeasibleError as exc:
            return ExpansionNode(s, b, (), f"stage at degree {d} infeasible: {exc}")
        return ExpansionNode(s, b, tuple(build(hj, d) for hj in h))

    return ExpansionTree(G, f, m0, N0, build(f, f.degree), target)
