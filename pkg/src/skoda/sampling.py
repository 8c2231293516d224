"""Seeded random instances for sweeps and property tests."""

from __future__ import annotations

import numpy as np

from .errors import SingularityError
from .holo import GeneratorSystem, gnorm2
from .poly import MultiPoly, monomials
from .psh import LogTerm, PshWeight


def cnormal(rng: np.random.Generator, shape=()) -> np.ndarray:
    return rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape)


def random_poly(rng: np.random.Generator, nvars: int, degree: int, density: float = 1.0) -> MultiPoly:
    """Coefficients uniform in [-1, 1]^2 on a random subset of monomials of degree <= degree."""
    exps = monomials(nvars, degree)
    while True:
        keep = rng.random(len(exps)) < density
        coeffs = np.where(keep, cnormal(rng, len(exps)), 0)
        p = MultiPoly.from_coeffs(nvars, exps, coeffs)
        if not p.is_zero():
            return p


def random_generators(rng: np.random.Generator, n: int, p: int, degree: int) -> GeneratorSystem:
    return GeneratorSystem(tuple(random_poly(rng, n, int(rng.integers(0, degree + 1))) for _ in range(p)))


def random_point(rng: np.random.Generator, n: int, radius: float = 1.0) -> np.ndarray:
    return radius * cnormal(rng, n)


def regular_point(rng: np.random.Generator, G: GeneratorSystem, radius: float = 1.0, floor: float = 1e-6,
                  tries: int = 200):
    """A random point with |g|^2 >= floor, or the best of ``tries`` draws if none reaches it.

    The fallback keeps uniformly small systems usable; only a common zero at
    every draw raises.
    """
    best, best_n2 = None, 0.0
    for _ in range(tries):
        z = random_point(rng, G.n, radius)
        n2 = gnorm2(G, z)
        if n2 >= floor:
            return z
        if n2 > best_n2:
            best, best_n2 = z, n2
    if best is None:
        raise SingularityError(z.tolist(), "no regular point found; the generators vanish at every draw")
    return best


def kernel_vector(rng: np.random.Generator, G: GeneratorSystem, z) -> np.ndarray:
    """Random p x n array v with sum_j g_j(z) v[j, lam] = 0 (projection of a random array)."""
    gv = G.values(z)[0]
    v = cnormal(rng, (G.p, G.n))
    u = gv.conj() / np.linalg.norm(gv)
    # remove the component along conj(g) in each column
    return v - np.outer(u, gv @ v) / np.linalg.norm(gv)


def random_psh(rng: np.random.Generator, n: int, logs: int = 1, degree: int = 1) -> PshWeight:
    terms = tuple(
        LogTerm(float(rng.uniform(0, 1)), float(rng.uniform(0.1, 1)), random_poly(rng, n, degree)) for _ in range(logs)
    )
    return PshWeight(float(rng.uniform(-1, 1)), float(rng.uniform(0, 1)), terms)
