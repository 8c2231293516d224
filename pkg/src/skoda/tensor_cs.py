"""Cauchy-Schwarz inequalities for tensors with the factor min(r, n).

The bilinear form is the kernel:

    |sum_{l,k} s_{l,k} t_{l,k}|^2 <= min(r, n) * sum_{m,l} |sum_k s_{m,k} t_{l,k}|^2

and the wedge variant for a in C^p, b, c in C^p x C^n carries the factor
q * |a|^2 with q = min(n, p - 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError

TOL_ABS = 1e-12
TOL_REL = 1e-12


@dataclass(frozen=True)
class CsReport:
    lhs: float
    rhs: float
    factor: float
    slack: float
    holds: bool

    @property
    def ratio(self) -> float:
        """lhs / rhs, or nan when rhs vanishes."""
        return self.lhs / self.rhs if self.rhs > 0 else float("nan")


def _report(lhs: float, rhs: float, factor: float, tol_abs: float, tol_rel: float) -> CsReport:
    slack = factor * rhs - lhs
    return CsReport(lhs, rhs, factor, slack, bool(slack >= -tol_abs - tol_rel * factor * rhs))


def as_ctensor(x, name: str = "tensor") -> np.ndarray:
    arr = np.asarray(x, dtype=complex)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or 0 in arr.shape:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {np.shape(x)}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    return arr


def cs_tensor_check(S, T, tol_abs: float = TOL_ABS, tol_rel: float = TOL_REL) -> CsReport:
    """Bilinear (unconjugated) tensor inequality for r x n matrices S, T."""
    S = as_ctensor(S, "S")
    T = as_ctensor(T, "T")
    if S.shape != T.shape:
        raise ShapeError(f"S is {S.shape} but T is {T.shape}")
    r, n = S.shape
    lhs = abs(np.sum(S * T)) ** 2
    rhs = float(np.sum(np.abs(S @ T.T) ** 2))
    return _report(float(lhs), rhs, min(r, n), tol_abs, tol_rel)


def cs_tensor_check_sesquilinear(S, T, **tol) -> CsReport:
    """Same inequality with conj(t_{l,k}) in place of t_{l,k}."""
    return cs_tensor_check(S, np.conj(as_ctensor(T, "T")), **tol)


def _wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """A[j, l, k] = a_j b_{l,k} - a_l b_{j,k}."""
    return a[:, None, None] * b[None, :, :] - a[None, :, None] * b[:, None, :]


def _wedge_args(a, b, c):
    a = as_ctensor(a, "a")
    if a.shape[1] != 1:
        raise ShapeError(f"a must be p x 1, got {a.shape}")
    a = a[:, 0]
    b = as_ctensor(b, "b")
    c = as_ctensor(c, "c")
    p = a.size
    if b.shape[0] != p or c.shape != b.shape:
        raise ShapeError(f"b, c must both be {p} x n; got {b.shape} and {c.shape}")
    if p < 2:
        raise DomainError("wedge inequality needs p >= 2")
    return a, b, c


def wedge_sides(a, b, c) -> tuple[float, float, int]:
    """(lhs, rhs, q) of the wedge inequality, evaluated literally."""
    a, b, c = _wedge_args(a, b, c)
    p, n = b.shape
    A = _wedge(a, b)
    lhs = abs(np.einsum("j,jlk,lk->", a.conj(), A, c)) ** 2
    iu = np.triu_indices(p, k=1)
    inner = np.einsum("mjk,lk->mjl", A, c)  # inner[m, j, l] = sum_k A[m, j, k] c[l, k]
    rhs = float(np.sum(np.abs(inner[iu]) ** 2))
    return float(lhs), rhs, min(n, p - 1)


def cs_wedge_check(a, b, c, tol_abs: float = TOL_ABS, tol_rel: float = TOL_REL) -> CsReport:
    """Wedge inequality with factor q * |a|^2."""
    lhs, rhs, q = wedge_sides(a, b, c)
    a2 = float(np.sum(np.abs(np.asarray(a, dtype=complex)) ** 2))
    return _report(lhs, rhs, q * a2, tol_abs, tol_rel)


def skew_identity_sides(a, b, c) -> tuple[complex, complex]:
    """Both sides of the skew-symmetrization identity

    sum_{j<l,k} A_{jl,k} conj(a_j c_{l,k} - a_l c_{j,k}) = sum_{j,l,k} A_{jl,k} conj(a_j c_{l,k}).
    """
    a, b, c = _wedge_args(a, b, c)
    p = a.size
    A = _wedge(a, b)
    C = _wedge(a, c)
    iu = np.triu_indices(p, k=1)
    left = np.sum(A[iu] * C[iu].conj())
    right = np.einsum("jlk,j,lk->", A, a.conj(), c.conj())
    return complex(left), complex(right)


def householder_to_last(u: np.ndarray) -> np.ndarray:
    """Unitary U with U e_p = u for a unit vector u (reflection times a phase)."""
    u = np.asarray(u, dtype=complex)
    p = u.size
    phase = u[-1] / abs(u[-1]) if abs(u[-1]) > 0 else 1.0
    y = np.zeros(p, dtype=complex)
    y[-1] = phase
    w = y - u
    nw = np.linalg.norm(w)
    H = np.eye(p, dtype=complex)
    if nw > 1e-15:
        w = w / nw
        H = H - 2.0 * np.outer(w, w.conj())
    D = np.eye(p, dtype=complex)
    D[-1, -1] = phase
    return H @ D


@dataclass(frozen=True)
class WedgeReduction:
    """Result of rotating a to |a| e_p.

    lhs_wedge = lhs_scale * lhs(S, T) and
    rhs_wedge = rhs_scale * (rhs(S, T) + normal_term), where normal_term
    collects the component of c along a and vanishes when sum_l a_l c_{l,k} = 0.
    """

    S: np.ndarray
    T: np.ndarray
    lhs_scale: float
    rhs_scale: float
    normal_term: float
    unitary: np.ndarray


def reduce_wedge_to_tensor(a, b, c) -> WedgeReduction:
    a, b, c = _wedge_args(a, b, c)
    na2 = float(np.sum(np.abs(a) ** 2))
    if na2 == 0:
        raise DomainError("reduction needs a != 0")
    U = householder_to_last(a / np.sqrt(na2))
    b1 = U.conj().T @ b  # a = |a| U e_p, b = U b1
    c1 = U.T @ c  # preserves the bilinear pairing with b
    # (e_p ^ x)_{m, p} = -x_m for m < p
    S = -b1[:-1]
    T = -c1[:-1]
    normal = float(np.sum(np.abs(S @ c1[-1]) ** 2))
    return WedgeReduction(S, T, na2**2, na2, normal, U)


def identity_pattern(r: int, n: int) -> np.ndarray:
    m = min(r, n)
    S = np.zeros((r, n), dtype=complex)
    S[np.arange(m), np.arange(m)] = 1
    return S


def random_ctensor(rng: np.random.Generator, shape) -> np.ndarray:
    """Entries uniform in the square [-1, 1] x [-1, 1] of C."""
    return rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape)


def tightness_search(r: int, n: int, trials: int, seed: int) -> float:
    """Largest lhs/rhs over the identity pattern and ``trials`` random pairs."""
    if r < 1 or n < 1:
        raise DomainError("r and n must be >= 1")
    I = identity_pattern(r, n)
    best = cs_tensor_check(I, I).ratio
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        rep = cs_tensor_check(random_ctensor(rng, (r, n)), random_ctensor(rng, (r, n)))
        if rep.rhs > 0:
            best = max(best, rep.ratio)
    return float(best)
