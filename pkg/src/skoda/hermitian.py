"""Hermitian forms with spectral queries and a thresholded pseudo-inverse."""

from __future__ import annotations

import numpy as np

from .errors import ShapeError

# eigenvalues below NULL_REL * lambda_max count as zero (rank, Tr_omega, Theta^-1)
NULL_REL = 1e-8


class HermitianForm:
    """k x k Hermitian matrix M, read as the form v -> sum M[a, b] v_a conj(v_b).

    The input is symmetrized on construction, so M == M^H holds exactly.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=complex)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"Hermitian form needs a square matrix, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("Hermitian form has non-finite entries")
        self.matrix = 0.5 * (m + m.conj().T)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def scale(self) -> float:
        """1 + largest entry modulus; the yardstick for eigenvalue tolerances."""
        return 1.0 + (float(np.abs(self.matrix).max()) if self.dim else 0.0)

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix) if self.dim else np.zeros(0)

    @property
    def lambda_min(self) -> float:
        ev = self.eigvalsh()
        return float(ev[0]) if ev.size else 0.0

    @property
    def lambda_max(self) -> float:
        ev = self.eigvalsh()
        return float(ev[-1]) if ev.size else 0.0

    def rank(self, rel: float = NULL_REL) -> int:
        ev = self.eigvalsh()
        if not ev.size:
            return 0
        top = max(abs(ev[0]), abs(ev[-1]))
        if top == 0:
            return 0
        return int(np.sum(np.abs(ev) > rel * top))

    def is_psd(self, tol: float) -> bool:
        return self.lambda_min >= -tol

    def value(self, v) -> float:
        v = np.asarray(v, dtype=complex).reshape(-1)
        if v.size != self.dim:
            raise ShapeError(f"vector of length {v.size} for form of dim {self.dim}")
        return float(np.real(v @ self.matrix @ v.conj()))

    def __add__(self, other: "HermitianForm") -> "HermitianForm":
        return HermitianForm(self.matrix + other.matrix)

    def __sub__(self, other: "HermitianForm") -> "HermitianForm":
        return HermitianForm(self.matrix - other.matrix)

    def __mul__(self, c: float) -> "HermitianForm":
        return HermitianForm(self.matrix * c)

    __rmul__ = __mul__

    def __repr__(self):
        return f"HermitianForm(dim={self.dim}, lambda_min={self.lambda_min:.3e})"


def split_spectrum(matrix: np.ndarray, rel: float = NULL_REL):
    """Eigen-split of a Hermitian PSD matrix into (positive eigvals, their vectors, null vectors)."""
    w, u = np.linalg.eigh(matrix)
    top = float(np.max(np.abs(w))) if w.size else 0.0
    keep = w > rel * top if top > 0 else np.zeros(w.shape, dtype=bool)
    return w[keep], u[:, keep], u[:, ~keep]
