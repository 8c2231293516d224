"""Curvature of the kernel subbundle of (g_1, ..., g_p) and derived diagnostics.

The kernel K = {v in C^p : sum_j g_j v_j = 0} carries the metric induced by
the flat metric of C^p. Its Nakano curvature is computed two independent ways:

* from a holomorphic frame, differentiating the induced metric exactly
  (``nakano_form_kernel_frame``);
* from the closed formula in terms of g and dg (``nakano_form_kernel_closed``).

Curvature convention: Theta = -d dbar H + (dH) H^{-1} (dbar H) with lowered
fiber indices, so a line bundle with metric e^{-phi} has Theta = e^{-phi} d dbar phi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError, PreconditionError
from .hermitian import NULL_REL, HermitianForm, split_spectrum
from .holo import (
    GeneratorSystem,
    _nonsingular,
    dbar_datum_matrix,
    log_hessian_matrix,
)
from .poly import BiPoly, MultiPoly
from .psh import PshWeight

KERNEL_TOL = 1e-10


@dataclass(frozen=True)
class NakanoTensor:
    """Components Theta[j, k, lam, nu] of a curvature tensor."""

    entries: np.ndarray

    @property
    def r(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[2]

    def flatten(self) -> HermitianForm:
        """Form on C^r (x) C^n, index pairs (j, lam) in row-major order."""
        r, n = self.r, self.n
        return HermitianForm(self.entries.transpose(0, 2, 1, 3).reshape(r * n, r * n))

    def value(self, v) -> float:
        """sum Theta[j, k, lam, nu] v[j, lam] conj(v[k, nu])."""
        v = np.asarray(v, dtype=complex).reshape(self.r, self.n)
        return float(np.real(np.einsum("jkab,ja,kb->", self.entries, v, v.conj())))

    def hermitian_defect(self) -> float:
        """max |Theta[j,k,lam,nu] - conj(Theta[k,j,nu,lam])|."""
        e = self.entries
        return float(np.abs(e - e.transpose(1, 0, 3, 2).conj()).max()) if e.size else 0.0


@dataclass(frozen=True)
class KernelFrame:
    """Holomorphic frame of the kernel near a point.

    ``rows[a]`` is a p-tuple of polynomials; row a has g_pivot in slot a'
    (the a-th non-pivot index) and -g_{a'} in the pivot slot.
    """

    G: GeneratorSystem
    pivot: int
    rows: tuple
    metric: tuple  # metric[a][b] = <e_a, e_b> as BiPoly

    @property
    def rank(self) -> int:
        return len(self.rows)

    def vectors(self, z) -> np.ndarray:
        """(rank, p) array of frame vectors at z."""
        return np.array([[c(z) for c in row] for row in self.rows], dtype=complex).reshape(self.rank, self.G.p)

    def metric_jet(self, z):
        """H, dH[lam], dbarH[nu], d dbarH[lam, nu] at z, as numpy arrays."""
        r, n = self.rank, self.G.n
        H = np.zeros((r, r), dtype=complex)
        dH = np.zeros((n, r, r), dtype=complex)
        dbH = np.zeros((n, r, r), dtype=complex)
        ddH = np.zeros((n, n, r, r), dtype=complex)
        for a in range(r):
            for b in range(r):
                h = self.metric[a][b]
                H[a, b] = h(z)
                for lam in range(n):
                    dl = h.d(lam)
                    dH[lam, a, b] = dl(z)
                    dbH[lam, a, b] = h.dbar(lam)(z)
                    for nu in range(n):
                        ddH[lam, nu, a, b] = dl.dbar(nu)(z)
        return H, dH, dbH, ddH


def kernel_frame(G: GeneratorSystem, z) -> KernelFrame:
    """Frame e_a with pivot = argmax_j |g_j(z)|; a trivial (rank 0) frame when p = 1."""
    z, gv, _, _ = _nonsingular(G, z)
    pivot = int(np.argmax(np.abs(gv)))
    if G.p < 2:
        return KernelFrame(G, pivot, (), ())
    zero = MultiPoly.zero(G.n)
    rows = []
    for j in range(G.p):
        if j == pivot:
            continue
        row = [zero] * G.p
        row[j] = G.g[pivot]
        row[pivot] = -G.g[j]
        rows.append(tuple(row))
    metric = tuple(
        tuple(BiPoly((ra[i], rb[i]) for i in range(G.p)) for rb in rows) for ra in rows
    )
    return KernelFrame(G, pivot, tuple(rows), metric)


def check_kernel_vector(G: GeneratorSystem, z, v, tol: float = KERNEL_TOL) -> np.ndarray:
    """Validate sum_j g_j(z) v[j, lam] = 0 for every lam; return v as a p x n array."""
    z, gv, _, _ = _nonsingular(G, z)
    v = np.asarray(v, dtype=complex).reshape(G.p, G.n)
    contraction = gv @ v
    bound = tol * (1.0 + np.linalg.norm(gv) * np.linalg.norm(v))
    if np.abs(contraction).max() > bound:
        raise DomainError(
            f"v is not in the kernel: max |sum_j g_j v[j, lam]| = {np.abs(contraction).max():.3e}"
        )
    return v


def nakano_form_kernel_closed(G: GeneratorSystem, z, v) -> float:
    """Closed-form curvature value

    -|sum_{j,l,lam} conj(g_l)(g_l d_lam g_j - g_j d_lam g_l) v[j, lam]|^2 / |g|^6.
    """
    v = check_kernel_vector(G, z, v)
    z, gv, D, n2 = _nonsingular(G, z)
    # X[l, j, lam] = g_l D[j, lam] - g_j D[l, lam]
    X = gv[:, None, None] * D[None, :, :] - gv[None, :, None] * D[:, None, :]
    s = np.einsum("l,ljk,jk->", gv.conj(), X, v)
    return float(-(abs(s) ** 2) / n2**3)


@dataclass(frozen=True)
class KernelCurvature:
    """Curvature of the kernel in the frame orthonormalized at the point.

    ``chol`` is L with H(z) = L L^H; frame coordinates v map to orthonormal
    coordinates L^T v.
    """

    frame: KernelFrame
    theta: NakanoTensor
    chol: np.ndarray

    def to_orthonormal(self, v_frame) -> np.ndarray:
        v = np.asarray(v_frame, dtype=complex).reshape(self.frame.rank, self.frame.G.n)
        return self.chol.T @ v


def kernel_curvature(G: GeneratorSystem, z) -> KernelCurvature:
    """Theta of the kernel at z via the subbundle metric and exact BiPoly derivatives.

    The frame is made orthonormal at z by the constant matrix A = L^{-1}; then
    H~(z) = I and Theta~ = -d dbar H~ + (d H~)(dbar H~).
    """
    z, *_ = _nonsingular(G, z)
    frame = kernel_frame(G, z)
    r, n = frame.rank, G.n
    if r == 0:
        return KernelCurvature(frame, NakanoTensor(np.zeros((0, 0, n, n), dtype=complex)), np.zeros((0, 0)))
    H, dH, dbH, ddH = frame.metric_jet(z)
    H = 0.5 * (H + H.conj().T)
    L = np.linalg.cholesky(H)
    A = scipy.linalg.solve_triangular(L, np.eye(r), lower=True)
    Ah = A.conj().T
    dHt = A @ dH @ Ah
    dbHt = A @ dbH @ Ah
    ddHt = A @ ddH @ Ah
    theta = np.empty((r, r, n, n), dtype=complex)
    for lam in range(n):
        for nu in range(n):
            theta[:, :, lam, nu] = -ddHt[lam, nu] + dHt[lam] @ dbHt[nu]
    return KernelCurvature(frame, NakanoTensor(theta), L)


def nakano_form_kernel_frame(G: GeneratorSystem, z, v_frame) -> float:
    """Curvature value at a tangent-fiber vector given in frame coordinates ((p-1) x n)."""
    kc = kernel_curvature(G, z)
    if kc.frame.rank == 0:
        return 0.0
    return kc.theta.value(kc.to_orthonormal(v_frame))


def frame_to_ambient(frame: KernelFrame, z, v_frame) -> np.ndarray:
    """p x n ambient vector sum_a v_frame[a, lam] e_a(z)."""
    E = frame.vectors(z)
    v = np.asarray(v_frame, dtype=complex).reshape(frame.rank, frame.G.n)
    return E.T @ v


def twisted_domination(G: GeneratorSystem, z, gamma: float) -> HermitianForm:
    """Theta(gamma) - (gamma - q) (H (x) omega) on the kernel fiber at z.

    Theta(gamma) = Theta + gamma * omega (x) H is the curvature of H / |g|^{2 gamma}
    up to the positive factor |g|^{-2 gamma}. Computed in the frame that is
    orthonormal at z, where H = I.
    """
    if G.p < 2:
        raise DomainError("kernel is trivial for p = 1")
    q = G.q
    if gamma < q:
        raise PreconditionError(f"need gamma >= q = {q}, got {gamma}")
    z, gv, D, n2 = _nonsingular(G, z)
    kc = kernel_curvature(G, z)
    omega = log_hessian_matrix(gv, D, n2)
    r, n = kc.frame.rank, G.n
    eye = np.eye(r)
    h_omega = np.einsum("jk,ab->jkab", eye, omega)
    twisted = kc.theta.entries + gamma * h_omega
    return NakanoTensor(twisted - (gamma - q) * h_omega).flatten()


def _fbtr_matrix(F: np.ndarray, weight: float) -> np.ndarray:
    # FbTr[lam, nu] = weight * sum_j F[j, nu] conj(F[j, lam])
    return weight * (F.conj().T @ F)


def fbtr(G: GeneratorSystem, f: MultiPoly, psi: PshWeight, gamma: float, z) -> HermitianForm:
    """Fiber trace of F = dbar_datum(G, f) under the metric e^{-psi} / |g|^{2(q + gamma)}."""
    z, gv, D, n2 = _nonsingular(G, z)
    F = dbar_datum_matrix(gv, D, n2, f(z))
    weight = np.exp(-psi(z)) / n2 ** (G.q + gamma)
    return HermitianForm(_fbtr_matrix(F, weight))


def tr_omega(A: HermitianForm, omega: HermitianForm, rel: float = NULL_REL) -> float:
    """Trace of A with respect to a semipositive omega, as the eps -> 0+ limit.

    Returns +inf when A has a component in the null space of omega.
    """
    a = A.matrix
    w, u, u0 = split_spectrum(omega.matrix, rel)
    if u0.size:
        null_block = u0.conj().T @ a @ u0
        a_scale = float(np.abs(a).max()) if a.size else 0.0
        if np.abs(null_block).max() > rel * a_scale and a_scale > 0:
            return float("inf")
    # tr(omega^+ A) with the [lam, nu] index convention of both forms
    return float(np.real(np.sum(np.einsum("ai,ab,bi->i", u.conj(), a, u) / w))) if w.size else 0.0


def tr_omega_eps(A: HermitianForm, omega: HermitianForm, eps: float) -> float:
    """Trace of A with respect to omega + eps * I (finite for eps > 0)."""
    m = omega.matrix + eps * np.eye(omega.dim)
    return float(np.real(np.trace(np.linalg.solve(m, A.matrix))))


def identity_54_sides(G: GeneratorSystem, f: MultiPoly, psi: PshWeight, gamma: float, z):
    """(Phi * omega(gamma), FbTr(F)) as matrices, with

    Phi = |f|^2 e^{-psi} / (gamma |g|^{2(q+gamma)} |g|^2) and omega(gamma) = gamma d dbar log|g|^2.
    """
    z, gv, D, n2 = _nonsingular(G, z)
    if not gamma > 0:
        raise DomainError(f"gamma must be > 0, got {gamma}")
    e_psi = np.exp(-psi(z))
    phi = abs(f(z)) ** 2 * e_psi / (gamma * n2 ** (G.q + gamma) * n2)
    left = phi * gamma * log_hessian_matrix(gv, D, n2)
    right = fbtr(G, f, psi, gamma, z).matrix
    return left, right


def verify_5_4(G: GeneratorSystem, f: MultiPoly, psi: PshWeight, gamma: float, z) -> float:
    """Max-entry relative difference between Phi * omega(gamma) and FbTr(F).

    The denominator also includes the size Phi * gamma * |dg|^2 / |g|^2 of
    the terms that cancel inside omega, so that identically vanishing sides
    (p = 1, where omega = 0) compare roundoff against a meaningful scale.
    """
    left, right = identity_54_sides(G, f, psi, gamma, z)
    _, gv, D, n2 = _nonsingular(G, z)
    phi = abs(f(z)) ** 2 * np.exp(-psi(z)) / (gamma * n2 ** (G.q + gamma) * n2)
    cancel = phi * gamma * float(np.sum(np.abs(D) ** 2)) / n2
    top = max(float(np.abs(left).max()), float(np.abs(right).max()), cancel)
    if top == 0:
        return 0.0
    return float(np.abs(left - right).max() / top)


def variant_inequality_check(G: GeneratorSystem, z, which: str) -> HermitianForm:
    """Difference form of the weight inequalities used by the variant theorems.

    (a) d dbar log(1 + |g|^2) - |g|^2 / (1 + |g|^2) * d dbar log|g|^2
    (c) -d dbar log log(1/|g|^2) - d dbar log|g|^2 / log(1/|g|^2), needs |g| < 1

    The left-hand sides come from the chain rule on the derivatives of
    N = |g|^2, independently of the log-Hessian routine.
    """
    z, gv, D, n2 = _nonsingular(G, z)
    N_l = D.T @ gv.conj()  # d_lam N
    N_ln = D.T @ D.conj()  # d_lam dbar_nu N
    dd_N = np.outer(N_l, N_l.conj())  # d_lam N * dbar_nu N
    omega = log_hessian_matrix(gv, D, n2)
    if which == "a":
        lhs = N_ln / (1 + n2) - dd_N / (1 + n2) ** 2
        return HermitianForm(lhs - n2 / (1 + n2) * omega)
    if which == "c":
        if not n2 < 1:
            raise PreconditionError(f"variant (c) needs |g|^2 < 1, got {n2}")
        ell_ln = N_ln / n2 - dd_N / n2**2  # d dbar log N
        ell_l = N_l / n2
        L = -np.log(n2)
        # log L with L = -log N: (log L)_{lam nu} = L_{lam nu} / L - L_lam L_nu / L^2
        loglog = -ell_ln / L - np.outer(ell_l, ell_l.conj()) / L**2
        return HermitianForm(-loglog - omega / L)
    raise ValueError(f"which must be 'a' or 'c', got {which!r}")


def cs_type_check(theta: HermitianForm, F, F2, rel: float = NULL_REL):
    """Both sides of |(F, F2)|^2 <= (Theta^{-1} F, F) (Theta F2, F2) for PSD Theta.

    Theta^{-1} is the eps -> 0+ limit of (Theta + eps I)^{-1}, and the right
    side is the limit of the eps-regularized product, so it may be +inf.
    Pairings use the operator convention (X, Y) = sum X conj(Y).
    """
    F = np.asarray(F, dtype=complex).reshape(-1)
    F2 = np.asarray(F2, dtype=complex).reshape(-1)
    M = theta.matrix
    lhs = abs(np.vdot(F2, F)) ** 2
    w, u, u0 = split_spectrum(M, rel)
    pos = float(np.sum(np.abs(u.conj().T @ F) ** 2 / w)) if w.size else 0.0
    null = float(np.sum(np.abs(u0.conj().T @ F) ** 2)) if u0.size else 0.0
    fwd = max(float(np.real(np.vdot(F2, M @ F2))), 0.0)
    if null <= (rel * np.linalg.norm(F)) ** 2:
        rhs = pos * fwd
    elif fwd > 0:
        rhs = float("inf")
    else:
        rhs = null * float(np.vdot(F2, F2).real)
    return float(lhs), float(rhs)
