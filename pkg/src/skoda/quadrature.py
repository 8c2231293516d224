"""Quadrature on polydiscs for weighted, possibly singular densities.

Per complex variable the rule is Gauss-Legendre in s = r^2 on (0, R^2]
(since dA = ds dtheta / 2) times uniform angles; grids for several
variables are tensor products. Sums use ``math.fsum`` in node order, so
results are deterministic and insensitive to cancellation.

Densities are callables mapping an (N, n) array of points to N real
values. A non-finite value marks a skipped node (for instance a point where
|g|^2 falls below ``NODE_FLOOR``); its weight is reported, never averaged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError, HypothesisFailed, PreconditionError
from .hermitian import NULL_REL
from .holo import GeneratorSystem
from .poly import MultiPoly
from .psh import PshWeight

NODE_FLOOR = 1e-14
GROWTH_FACTOR = 1.5
STALL_RATIO = 0.75
STALL_REL = 1e-7
CHUNK = 1 << 16

Density = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Domain:
    """Polydisc prod_i {|z_i - c_i| < R_i}."""

    radii: tuple
    center: tuple | None = None
    kind: str = "polydisc"

    def __post_init__(self):
        radii = tuple(float(r) for r in np.atleast_1d(self.radii))
        if not radii or not all(np.isfinite(r) and r > 0 for r in radii):
            raise DomainError(f"radii must be positive and finite, got {self.radii}")
        if self.kind != "polydisc":
            raise DomainError(f"only polydisc domains are supported, got {self.kind!r}")
        center = (0j,) * len(radii) if self.center is None else tuple(complex(c) for c in self.center)
        if len(center) != len(radii):
            raise DomainError(f"center has {len(center)} coordinates, radii has {len(radii)}")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "center", center)

    @classmethod
    def unit(cls, n: int = 1) -> "Domain":
        return cls((1.0,) * n)

    @classmethod
    def from_config(cls, cfg: dict | None, nvars: int) -> "Domain":
        if not cfg:
            return cls.unit(nvars)
        radii = cfg.get("radii", [1.0] * nvars)
        center = cfg.get("center")
        if center is not None:
            center = [complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c) for c in center]
        return cls(tuple(radii), None if center is None else tuple(center), cfg.get("kind", "polydisc"))

    def to_config(self) -> dict:
        return {
            "kind": self.kind,
            "radii": list(self.radii),
            "center": [[c.real, c.imag] for c in self.center],
        }

    @property
    def n(self) -> int:
        return len(self.radii)

    @property
    def volume(self) -> float:
        return float(np.prod([math.pi * r * r for r in self.radii]))


@lru_cache(maxsize=64)
def _axis_rule(R: float, radial: int, angular: int):
    """Offsets and weights of the one-variable rule on the disc of radius R."""
    x, w = np.polynomial.legendre.leggauss(radial)
    s = 0.5 * R * R * (x + 1.0)
    theta = 2.0 * np.pi * np.arange(angular) / angular
    offsets = (np.sqrt(s)[:, None] * np.exp(1j * theta)[None, :]).reshape(-1)
    weights = np.repeat(np.pi * R * R * w / (2.0 * angular), angular)
    offsets.setflags(write=False)
    weights.setflags(write=False)
    return offsets, weights


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    domain: Domain
    radial: int
    angular: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def resolution(self) -> tuple:
        """(radial, angular) for each complex variable."""
        return ((self.radial, self.angular),) * self.domain.n

    @property
    def size(self) -> int:
        return self.weights.size

    def refine(self) -> "QuadratureGrid":
        """The grid with radial and angular counts doubled."""
        return build_grid(self.domain, 2 * self.radial, 2 * self.angular)


def build_grid(domain: Domain, radial: int, angular: int) -> QuadratureGrid:
    if radial < 2 or angular < 2:
        raise DomainError(f"grid needs radial, angular >= 2, got {radial}x{angular}")
    rules = [_axis_rule(R, int(radial), int(angular)) for R in domain.radii]
    m = rules[0][0].size
    idx = np.indices((m,) * domain.n).reshape(domain.n, -1)
    nodes = np.stack(
        [domain.center[i] + rules[i][0][idx[i]] for i in range(domain.n)], axis=1
    )
    weights = np.ones(idx.shape[1])
    for i in range(domain.n):
        weights = weights * rules[i][1][idx[i]]
    return QuadratureGrid(domain, int(radial), int(angular), nodes, weights)


@dataclass(frozen=True)
class IntegralResult:
    """Value on the base grid plus the refinement sequence used for the divergence flag."""

    value: float
    diverged: bool
    skipped_nodes: int
    skipped_weight: float
    levels: tuple = ()
    nodes: int = 0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "diverged": self.diverged,
            "skipped_nodes": self.skipped_nodes,
            "skipped_weight": self.skipped_weight,
            "levels": list(self.levels),
            "nodes": self.nodes,
        }


def evaluate(density: Density, grid: QuadratureGrid) -> np.ndarray:
    """Density values at every node, evaluated in fixed-size chunks."""
    out = np.empty(grid.size)
    for start in range(0, grid.size, CHUNK):
        stop = min(start + CHUNK, grid.size)
        out[start:stop] = np.asarray(density(grid.nodes[start:stop]), dtype=float)
    return out


def _sum(density: Density, grid: QuadratureGrid):
    vals = evaluate(density, grid)
    ok = np.isfinite(vals)
    value = math.fsum((vals[ok] * grid.weights[ok]).tolist())
    skipped = int(np.sum(~ok))
    return value, skipped, math.fsum(grid.weights[~ok].tolist())


def divergence_flag(levels) -> bool:
    """Heuristic flag on values at grids m, 2m, 4m (or just m, 2m).

    Diverged when a doubling grows the value by GROWTH_FACTOR or more, or when
    the increments fail to decay (ratio >= STALL_RATIO while still above
    STALL_REL relative). The second rule catches logarithmic divergence,
    which Gauss-Legendre sums in r^2 expose only as slow steady growth.
    """
    levels = [float(v) for v in levels]
    if not all(np.isfinite(levels)):
        return True
    for a, b in zip(levels, levels[1:]):
        if a > 0 and b >= GROWTH_FACTOR * a:
            return True
    if len(levels) >= 3:
        d1 = levels[-2] - levels[-3]
        d2 = levels[-1] - levels[-2]
        if d1 > 0 and d2 > STALL_REL * abs(levels[-1]) and d2 >= STALL_RATIO * d1:
            return True
    return False


def integrate(density: Density, grid: QuadratureGrid, check_divergence: bool = True) -> IntegralResult:
    """Compensated sum of density * weight; optionally refine twice to flag divergence."""
    value, skipped, skipped_w = _sum(density, grid)
    levels = (value,)
    diverged = not np.isfinite(value)
    if check_divergence and not diverged:
        g2 = grid.refine()
        v2 = _sum(density, g2)[0]
        v4 = _sum(density, g2.refine())[0]
        levels = (value, v2, v4)
        diverged = divergence_flag(levels)
    return IntegralResult(value, diverged, skipped, skipped_w, levels, grid.size)


def monomial_oracle(R: float, k: int) -> float:
    """Exact value of the integral of |z^k|^2 over the disc of radius R."""
    return math.pi * R ** (2 * k + 2) / (k + 1)


# --- batched pointwise quantities -------------------------------------------------


def g_data(G: GeneratorSystem, pts: np.ndarray):
    """Values (N, p), jacobians (N, p, n) and |g|^2 (N,)."""
    gv = G.values(pts)
    return gv, G.jacobian(pts), np.sum(np.abs(gv) ** 2, axis=1)


def g_norm2(G: GeneratorSystem, pts: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(G.values(pts)) ** 2, axis=1)


def log_hessian_batch(gv: np.ndarray, D: np.ndarray, n2: np.ndarray) -> np.ndarray:
    """(N, n, n) stack of d_lam dbar_nu log|g|^2."""
    a = np.einsum("Njl,Njm->Nlm", D, D.conj())
    b = np.einsum("Njl,Nj->Nl", D, gv.conj())
    return a / n2[:, None, None] - b[:, :, None] * b.conj()[:, None, :] / (n2**2)[:, None, None]


def tr_omega_batch(A: np.ndarray, omega: np.ndarray, rel: float = NULL_REL) -> np.ndarray:
    """Pointwise Tr_omega A for (N, n, n) stacks; +inf where A meets null(omega)."""
    w, u = np.linalg.eigh(omega)
    top = np.max(np.abs(w), axis=1, keepdims=True)
    keep = (w > rel * top) & (top > 0)
    B = np.einsum("Nai,Nab,Nbj->Nij", u.conj(), A, u)
    diag = np.real(np.einsum("Nii->Ni", B))
    safe_w = np.where(keep, w, 1.0)
    out = np.sum(np.where(keep, diag / safe_w, 0.0), axis=1)
    null = ~keep[:, :, None] & ~keep[:, None, :]
    a_scale = np.max(np.abs(A).reshape(A.shape[0], -1), axis=1)
    leak = np.max(np.where(null, np.abs(B), 0.0).reshape(A.shape[0], -1), axis=1)
    out[(leak > rel * a_scale) & (a_scale > 0)] = np.inf
    return out


def _masked(n2: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.where(n2 < NODE_FLOOR, np.nan, values)


def _safe(n2: np.ndarray) -> np.ndarray:
    return np.where(n2 < NODE_FLOOR, 1.0, n2)


# --- weights and densities ------------------------------------------------------


VARIANTS = ("skoda", "a", "b", "c")


def _check_variant(variant: str, phi: PshWeight | None):
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if variant == "b" and (phi is None or phi.is_zero()):
        raise PreconditionError("variant b needs a nonzero phi weight")


def _log_inv(n2: np.ndarray) -> np.ndarray:
    if np.any(n2 >= 1):
        raise PreconditionError(f"variant c needs |g|^2 < 1 on the grid, max is {float(np.max(n2)):.6g}")
    return -np.log(_safe(n2))


def norm_weight(
    G: GeneratorSystem,
    psi: PshWeight,
    gamma: float = 1.0,
    variant: str = "skoda",
    phi: PshWeight | None = None,
) -> Density:
    """Weight w with ||h||^2 = int sum_j |h_j|^2 w.

    skoda: e^{-psi} / |g|^{2(q+gamma)}
    a:     e^{-psi} / (|g|^{2q} (1 + |g|^2))
    b:     e^{-(phi+psi)} / |g|^{2q}
    c:     log(1/|g|^2) e^{-psi} / |g|^{2q}
    """
    _check_variant(variant, phi)
    q = G.q

    def w(pts):
        n2 = g_norm2(G, pts)
        s = _safe(n2)
        e = np.exp(-psi(pts))
        if variant == "skoda":
            val = e / s ** (q + gamma)
        elif variant == "a":
            val = e / (s**q * (1 + s))
        elif variant == "b":
            val = np.exp(-(phi(pts) + psi(pts))) / s**q
        else:
            val = _log_inv(n2) * e / s**q
        return _masked(n2, val)

    return w


def constant_density(
    G: GeneratorSystem,
    f: MultiPoly,
    psi: PshWeight,
    gamma: float = 1.0,
    variant: str = "skoda",
    phi: PshWeight | None = None,
) -> Density:
    """Integrand of the bound constant of each theorem.

    skoda (C_hat): |f|^2 e^{-psi} / |g|^{2(q+1+gamma)}
    a (C1): |f|^2 (|g|^2 + q (1 + |g|^2)) e^{-psi} / (|g|^{2(q+2)} (1 + |g|^2))
    b (C2): |f|^2 (1 + Tr_omega d dbar log|g|^2) e^{-(phi+psi)} / |g|^{2(q+1)}, omega = d dbar phi
    c (C3): |f|^2 (L + q L^2) e^{-psi} / |g|^{2(q+1)}, L = log(1/|g|^2)
    """
    _check_variant(variant, phi)
    q = G.q

    def dens(pts):
        if variant == "b":
            gv, D, n2 = g_data(G, pts)
        else:
            n2 = g_norm2(G, pts)
        s = _safe(n2)
        f2 = np.abs(f(pts)) ** 2
        e = np.exp(-psi(pts))
        if variant == "skoda":
            val = f2 * e / s ** (q + 1 + gamma)
        elif variant == "a":
            val = f2 * (s + q * (1 + s)) * e / (s ** (q + 2) * (1 + s))
        elif variant == "b":
            lap = tr_omega_batch(log_hessian_batch(gv, D, s), phi.hessian(pts))
            with np.errstate(invalid="ignore"):
                val = f2 * (1 + lap) * np.exp(-(phi(pts) + psi(pts))) / s ** (q + 1)
            val = np.where(f2 == 0, 0.0, val)
        else:
            L = _log_inv(n2)
            val = f2 * (L + q * L * L) * e / s ** (q + 1)
        return _masked(n2, val)

    return dens


def bound_constant(
    G: GeneratorSystem,
    f: MultiPoly,
    psi: PshWeight,
    grid: QuadratureGrid,
    gamma: float = 1.0,
    variant: str = "skoda",
    phi: PshWeight | None = None,
    check_divergence: bool = True,
) -> IntegralResult:
    """C_hat (skoda) or C1/C2/C3 (variants a/b/c) on the grid."""
    if variant == "skoda" and not gamma > 0:
        raise DomainError(f"gamma must be > 0, got {gamma}")
    return integrate(constant_density(G, f, psi, gamma, variant, phi), grid, check_divergence)


def c_hat(G, f, psi, gamma, grid, check_divergence: bool = True) -> IntegralResult:
    return bound_constant(G, f, psi, grid, gamma, "skoda", None, check_divergence)


def require_finite(result: IntegralResult, name: str) -> float:
    """The value, or HypothesisFailed when the integral was flagged divergent."""
    if result.diverged:
        raise HypothesisFailed(f"{name} appears to diverge (refinement values {result.levels})", result.levels)
    return result.value
