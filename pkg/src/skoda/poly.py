"""Sparse multivariate polynomials over C and bi-polynomials A(z)*conj(B(z)).

Exponents are exact integer tuples; coefficients are Python complex numbers.
Axes are 0-based: ``P.partial(0)`` is d/dz1.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from numbers import Number
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, ShapeError

Exps = tuple


@lru_cache(maxsize=None)
def monomials(nvars: int, max_degree: int) -> tuple:
    """All exponent tuples of total degree <= max_degree, graded then reverse-lex."""
    if max_degree < 0:
        return ()
    out = []
    for deg in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return tuple(out)


def as_points(z, nvars: int) -> tuple[np.ndarray, bool]:
    """Coerce z to an (N, nvars) complex array; flag whether it was a single point."""
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != nvars:
        raise ShapeError(f"expected points with {nvars} coordinates, got shape {np.shape(z)}")
    return arr, single


def monomial_matrix(points: np.ndarray, exps: Sequence[Exps]) -> np.ndarray:
    """Values of each monomial at each point, shape (N, len(exps))."""
    pts = np.asarray(points, dtype=complex)
    n = pts.shape[1]
    top = max((max(e) for e in exps if e), default=0)
    powers = [np.ones((pts.shape[0], top + 1), dtype=complex) for _ in range(n)]
    for i in range(n):
        for k in range(1, top + 1):
            powers[i][:, k] = powers[i][:, k - 1] * pts[:, i]
    out = np.ones((pts.shape[0], len(exps)), dtype=complex)
    for col, e in enumerate(exps):
        for i, k in enumerate(e):
            if k:
                out[:, col] *= powers[i][:, k]
    return out


class MultiPoly:
    """Polynomial sum c_e z^e in ``nvars`` complex variables.

    Zero coefficients are never stored. Equality is exact on coefficients;
    use :meth:`allclose` for floating comparisons.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exps, complex] | None = None):
        if nvars < 1:
            raise DomainError(f"nvars must be >= 1, got {nvars}")
        self.nvars = int(nvars)
        clean: dict = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != self.nvars or any(k < 0 for k in e):
                raise ShapeError(f"bad exponent {e} for {self.nvars} variables")
            c = complex(c)
            if not np.isfinite(c.real) or not np.isfinite(c.imag):
                raise DomainError(f"non-finite coefficient {c} at {e}")
            if c != 0:
                clean[e] = clean.get(e, 0) + c
        self.terms = {e: c for e, c in clean.items() if c != 0}

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c: complex) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, axis: int) -> "MultiPoly":
        e = [0] * nvars
        e[axis] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Exps, c: complex = 1) -> "MultiPoly":
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def from_terms(cls, literal: Iterable[Mapping], nvars: int | None = None) -> "MultiPoly":
        """Build from the term-list literal ``[{"coeff": [re, im], "exps": [...]}, ...]``."""
        terms: dict = {}
        literal = list(literal)
        for t in literal:
            e = tuple(t["exps"])
            c = t["coeff"]
            c = complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
            terms[e] = terms.get(e, 0) + c
            if nvars is None:
                nvars = len(e)
        if nvars is None:
            raise ShapeError("cannot infer the number of variables of an empty term list")
        return cls(nvars, terms)

    @classmethod
    def from_coeffs(cls, nvars: int, exps: Sequence[Exps], coeffs) -> "MultiPoly":
        return cls(nvars, dict(zip(exps, np.asarray(coeffs, dtype=complex).tolist())))

    def to_terms(self) -> list[dict]:
        return [
            {"coeff": [c.real, c.imag], "exps": list(e)}
            for e, c in sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))
        ]

    def coeffs(self, exps: Sequence[Exps]) -> np.ndarray:
        return np.array([self.terms.get(tuple(e), 0) for e in exps], dtype=complex)

    # -- queries ------------------------------------------------------------

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def chop(self, tol: float) -> "MultiPoly":
        """Drop coefficients with modulus <= tol."""
        return MultiPoly(self.nvars, {e: c for e, c in self.terms.items() if abs(c) > tol})

    def allclose(self, other: "MultiPoly", tol: float = 1e-10) -> bool:
        diff = self - other
        return diff.max_abs_coeff() <= tol

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ShapeError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, Number):
            return MultiPoly.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return MultiPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise DomainError("negative powers are not polynomials")
        out = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Number):
            other = MultiPoly.constant(self.nvars, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- calculus -----------------------------------------------------------

    def partial(self, axis: int) -> "MultiPoly":
        """Holomorphic partial derivative d/dz_{axis}."""
        if not 0 <= axis < self.nvars:
            raise DomainError(f"axis {axis} out of range for {self.nvars} variables")
        out = {}
        for e, c in self.terms.items():
            k = e[axis]
            if k:
                e2 = list(e)
                e2[axis] = k - 1
                out[tuple(e2)] = c * k
        return MultiPoly(self.nvars, out)

    def __call__(self, z):
        pts, single = as_points(z, self.nvars)
        if not self.terms:
            vals = np.zeros(pts.shape[0], dtype=complex)
        else:
            exps = list(self.terms)
            coeffs = np.array([self.terms[e] for e in exps], dtype=complex)
            vals = monomial_matrix(pts, exps) @ coeffs
        return complex(vals[0]) if single else vals

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), kv[0])):
            mono = "*".join(
                f"z{i + 1}" if k == 1 else f"z{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            cs = f"{c.real:g}" if c.imag == 0 else f"({c.real:g}{c.imag:+g}j)"
            parts.append(cs if not mono else (mono if c == 1 else f"{cs}*{mono}"))
        return " + ".join(parts)


class BiPoly:
    """Finite sum of A_i(z) * conj(B_i(z)).

    Holomorphic derivatives act on the A factors only and antiholomorphic
    ones on the B factors, so mixed derivatives are exact.
    """

    __slots__ = ("pairs",)

    def __init__(self, pairs: Iterable[tuple[MultiPoly, MultiPoly]] = ()):
        self.pairs = tuple((a, b) for a, b in pairs if not a.is_zero() and not b.is_zero())

    @classmethod
    def product(cls, a: MultiPoly, b: MultiPoly) -> "BiPoly":
        return cls([(a, b)])

    def __add__(self, other: "BiPoly") -> "BiPoly":
        return BiPoly(self.pairs + other.pairs)

    def scale(self, c: complex) -> "BiPoly":
        return BiPoly((a * c, b) for a, b in self.pairs)

    def conj(self) -> "BiPoly":
        return BiPoly((b, a) for a, b in self.pairs)

    def d(self, axis: int) -> "BiPoly":
        """d/dz_axis."""
        return BiPoly((a.partial(axis), b) for a, b in self.pairs)

    def dbar(self, axis: int) -> "BiPoly":
        """d/d(conj z_axis)."""
        return BiPoly((a, b.partial(axis)) for a, b in self.pairs)

    def __call__(self, z):
        if not self.pairs:
            arr = np.asarray(z, dtype=complex)
            return 0j if arr.ndim <= 1 else np.zeros(arr.shape[0], dtype=complex)
        return sum(a(z) * np.conj(b(z)) for a, b in self.pairs)

    def __repr__(self):
        return " + ".join(f"({a})*conj({b})" for a, b in self.pairs) or "0"
