"""Plurisubharmonic weights psi(z) = c0 + c1*|z|^2 + sum_i kappa_i * log(eps_i + |p_i(z)|^2)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DomainError
from .poly import MultiPoly, as_points


@dataclass(frozen=True)
class LogTerm:
    kappa: float
    eps: float
    poly: MultiPoly

    def __post_init__(self):
        if self.kappa < 0:
            raise DomainError(f"log term needs kappa >= 0, got {self.kappa}")
        if not self.eps > 0:
            raise DomainError(f"log term needs eps > 0, got {self.eps}")


@dataclass(frozen=True)
class PshWeight:
    """Each term has a PSD complex Hessian, so the sum is plurisubharmonic."""

    c0: float = 0.0
    c1: float = 0.0
    logs: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.c1 < 0:
            raise DomainError(f"c1 must be >= 0, got {self.c1}")
        object.__setattr__(self, "logs", tuple(self.logs))

    @classmethod
    def from_config(cls, cfg: Mapping | None, nvars: int) -> "PshWeight":
        if not cfg:
            return cls()
        logs = tuple(
            LogTerm(float(t["kappa"]), float(t["eps"]), MultiPoly.from_terms(t["poly"], nvars))
            for t in cfg.get("logs", ())
        )
        return cls(float(cfg.get("c0", 0.0)), float(cfg.get("c1", 0.0)), logs)

    def to_config(self) -> dict:
        return {
            "c0": self.c0,
            "c1": self.c1,
            "logs": [{"kappa": t.kappa, "eps": t.eps, "poly": t.poly.to_terms()} for t in self.logs],
        }

    def is_zero(self) -> bool:
        return self.c0 == 0 and self.c1 == 0 and all(t.kappa == 0 for t in self.logs)

    def __call__(self, z):
        pts, single = as_points(z, _nvars(self, z))
        val = self.c0 + self.c1 * np.sum(np.abs(pts) ** 2, axis=1)
        for t in self.logs:
            val = val + t.kappa * np.log(t.eps + np.abs(t.poly(pts)) ** 2)
        return float(val[0]) if single else val

    def hessian(self, z) -> np.ndarray:
        """Complex Hessian [lam, nu] = d_lam dbar_nu psi, shape (N, n, n) or (n, n)."""
        pts, single = as_points(z, _nvars(self, z))
        N, n = pts.shape
        out = np.zeros((N, n, n), dtype=complex)
        out += self.c1 * np.eye(n)
        for t in self.logs:
            pv = t.poly(pts)
            dp = np.stack([t.poly.partial(l)(pts) for l in range(n)], axis=1)
            u = t.eps + np.abs(pv) ** 2
            # d dbar log(eps + |p|^2) = eps * dp conj(dp)^T / u^2
            out += (t.kappa * t.eps / u**2)[:, None, None] * dp[:, :, None] * dp.conj()[:, None, :]
        return out[0] if single else out


def _nvars(w: PshWeight, z) -> int:
    if w.logs:
        return w.logs[0].poly.nvars
    arr = np.asarray(z)
    return arr.shape[-1] if arr.ndim else 1
