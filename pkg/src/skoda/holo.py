"""Generator systems g = (g_1, ..., g_p) and the pointwise quantities built from them.

Everything here is algebraic in (g, dg), evaluated exactly from polynomial
coefficients. Points are 1-D arrays of length n; batched variants take (N, n).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DomainError, ShapeError, SingularityError
from .hermitian import HermitianForm
from .poly import MultiPoly, as_points


@dataclass(frozen=True)
class GeneratorSystem:
    g: tuple

    def __post_init__(self):
        g = tuple(self.g)
        if not g:
            raise DomainError("need at least one generator")
        n = g[0].nvars
        if any(gj.nvars != n for gj in g):
            raise ShapeError("generators live in different numbers of variables")
        if all(gj.is_zero() for gj in g):
            raise DomainError("generators are all identically zero")
        object.__setattr__(self, "g", g)

    @classmethod
    def from_literal(cls, literal: Sequence, nvars: int | None = None) -> "GeneratorSystem":
        if nvars is None:
            nvars = next((len(t["exps"]) for gj in literal for t in gj), None)
        return cls(tuple(MultiPoly.from_terms(gj, nvars) for gj in literal))

    @property
    def n(self) -> int:
        return self.g[0].nvars

    @property
    def p(self) -> int:
        return len(self.g)

    @property
    def q(self) -> int:
        return min(self.n, self.p - 1)

    @cached_property
    def partials(self) -> tuple:
        """partials[j][l] = d g_j / d z_l."""
        return tuple(tuple(gj.partial(l) for l in range(self.n)) for gj in self.g)

    def values(self, points) -> np.ndarray:
        pts, _ = as_points(points, self.n)
        return np.stack([gj(pts) for gj in self.g], axis=1)

    def jacobian(self, points) -> np.ndarray:
        """Array of shape (N, p, n) with entries d g_j / d z_l."""
        pts, _ = as_points(points, self.n)
        out = np.empty((pts.shape[0], self.p, self.n), dtype=complex)
        for j, row in enumerate(self.partials):
            for l, d in enumerate(row):
                out[:, j, l] = d(pts)
        return out

    def rotated(self, u: np.ndarray) -> "GeneratorSystem":
        """Image of g under a constant p x p matrix: g~_i = sum_j u[i, j] g_j."""
        u = np.asarray(u, dtype=complex)
        return GeneratorSystem(
            tuple(sum((self.g[j] * complex(u[i, j]) for j in range(self.p)), MultiPoly.zero(self.n))
                  for i in range(self.p))
        )


def _point(G: GeneratorSystem, z) -> np.ndarray:
    arr = np.asarray(z, dtype=complex).reshape(-1)
    if arr.size != G.n:
        raise ShapeError(f"point has {arr.size} coordinates, generators use {G.n}")
    return arr


def gnorm2(G: GeneratorSystem, z) -> float:
    """|g(z)|^2 = sum_j |g_j(z)|^2. Zero means z is a common zero."""
    gv = G.values(_point(G, z))[0]
    return float(np.sum(np.abs(gv) ** 2))


def is_common_zero(G: GeneratorSystem, z) -> bool:
    return gnorm2(G, z) == 0.0


def grad_matrix(G: GeneratorSystem, z) -> np.ndarray:
    """p x n matrix of d g_j / d z_l at z."""
    return G.jacobian(_point(G, z))[0]


def _nonsingular(G: GeneratorSystem, z):
    z = _point(G, z)
    gv = G.values(z)[0]
    n2 = float(np.sum(np.abs(gv) ** 2))
    if n2 == 0.0 or not np.isfinite(n2):
        raise SingularityError(z.tolist())
    return z, gv, G.jacobian(z)[0], n2


def log_hessian_matrix(gv: np.ndarray, D: np.ndarray, n2: float, method: str = "quotient") -> np.ndarray:
    """Matrix [lam, nu] of d_lam dbar_nu log|g|^2 from the values and jacobian of g."""
    if method == "quotient":
        a = D.T @ D.conj()
        b = D.T @ gv.conj()
        return a / n2 - np.outer(b, b.conj()) / n2**2
    if method == "wedge":
        p, n = D.shape
        out = np.zeros((n, n), dtype=complex)
        for j in range(p):
            for k in range(j + 1, p):
                w = D[j] * gv[k] - D[k] * gv[j]
                out += np.outer(w, w.conj())
        return out / n2**2
    raise ValueError(f"unknown method {method!r}")


def log_hessian(G: GeneratorSystem, z, method: str = "quotient") -> HermitianForm:
    """The (1,1)-form d dbar log|g|^2 at z.

    ``method="quotient"`` differentiates the quotient directly; ``"wedge"``
    uses the pairwise sum over (dg_j) g_k - (dg_k) g_j. They agree.
    """
    _, gv, D, n2 = _nonsingular(G, z)
    return HermitianForm(log_hessian_matrix(gv, D, n2, method))


def dbar_datum_matrix(gv: np.ndarray, D: np.ndarray, n2: float, fz: complex) -> np.ndarray:
    s = gv @ D.conj()  # s[nu] = sum_k g_k conj(d_nu g_k)
    return fz * (D.conj() / n2 - np.outer(gv.conj(), s) / n2**2)


def dbar_datum(G: GeneratorSystem, f: MultiPoly, z) -> np.ndarray:
    """p x n matrix F[j, nu] = f * dbar_nu(conj(g_j) / |g|^2) at z.

    F is kernel-valued: sum_j g_j F[j, nu] = 0.
    """
    z, gv, D, n2 = _nonsingular(G, z)
    return dbar_datum_matrix(gv, D, n2, f(z))
