"""Run configuration: defaults plus JSON parsing with field-path validation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .division import DivisionProblem
from .errors import ConfigError, SkodaError
from .holo import GeneratorSystem
from .poly import MultiPoly
from .psh import PshWeight
from .quadrature import VARIANTS, Domain
from .sweeps import DEFAULT_TOLERANCES

SWEEP_DEFAULTS = {
    "cs": 10_000,
    "wedge": 1000,
    "curvature": 100,
    "dominate": 100,
    "identity_54": 1000,
    "variants": 200,
    "division": 20,
}

# G = (z, z^2), f = z^3: the worked division example
DEFAULT_GENERATORS = [
    [{"coeff": [1.0, 0.0], "exps": [1]}],
    [{"coeff": [1.0, 0.0], "exps": [2]}],
]
DEFAULT_F = [{"coeff": [1.0, 0.0], "exps": [3]}]


@dataclass
class RunConfig:
    generators: list = field(default_factory=lambda: [list(g) for g in DEFAULT_GENERATORS])
    f: list = field(default_factory=lambda: list(DEFAULT_F))
    gamma: float = 1.0
    psi: dict = field(default_factory=dict)
    phi: dict | None = None
    domain: dict | None = None
    grid: list = field(default_factory=lambda: [64, 32])
    degree: int = 2
    variant: str = "skoda"
    sweep: dict = field(default_factory=lambda: dict(SWEEP_DEFAULTS))
    iterate: dict = field(default_factory=lambda: {"m0": 1, "N0": 1})
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0

    # --- derived objects ---

    @property
    def nvars(self) -> int:
        for g in self.generators:
            for t in g:
                return len(t["exps"])
        return 1

    def generator_system(self) -> GeneratorSystem:
        return GeneratorSystem(tuple(MultiPoly.from_terms(g, self.nvars) for g in self.generators))

    def f_poly(self) -> MultiPoly:
        return MultiPoly.from_terms(self.f, self.nvars)

    def problem(self) -> DivisionProblem:
        n = self.nvars
        return DivisionProblem(
            G=self.generator_system(),
            f=self.f_poly(),
            gamma=self.gamma,
            psi=PshWeight.from_config(self.psi, n),
            domain=Domain.from_config(self.domain, n),
            degree=self.degree,
            variant=self.variant,
            phi=PshWeight.from_config(self.phi, n) if self.phi else None,
            grid=tuple(self.grid),
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["domain"] = Domain.from_config(self.domain, self.nvars).to_config()
        return d


def _fail(path: str, msg: str):
    raise ConfigError(f"field '{path}': {msg}")


def _number(v, path: str, positive: bool = False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(path, f"expected a number, got {v!r}")
    if positive and not v > 0:
        _fail(path, f"must be > 0, got {v!r}")
    return float(v)


def _count(v, path: str, minimum: int = 0) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        _fail(path, f"expected an integer >= {minimum}, got {v!r}")
    return int(v)


def _poly_literal(v, path: str, nvars: int | None):
    if not isinstance(v, list):
        _fail(path, "expected a list of terms {coeff, exps}")
    for i, t in enumerate(v):
        tp = f"{path}[{i}]"
        if not isinstance(t, dict) or "coeff" not in t or "exps" not in t:
            _fail(tp, "each term needs 'coeff' and 'exps'")
        e = t["exps"]
        if not isinstance(e, list) or not all(isinstance(k, int) and not isinstance(k, bool) and k >= 0 for k in e):
            _fail(f"{tp}.exps", f"expected a list of nonnegative integers, got {e!r}")
        if nvars is not None and len(e) != nvars:
            _fail(f"{tp}.exps", f"expected {nvars} exponents, got {len(e)}")
        c = t["coeff"]
        if isinstance(c, list):
            if len(c) != 2:
                _fail(f"{tp}.coeff", "complex coefficients are [re, im]")
            for j, x in enumerate(c):
                _number(x, f"{tp}.coeff[{j}]")
        else:
            _number(c, f"{tp}.coeff")
    return v


def _weight(v, path: str, nvars: int):
    if v is None:
        return None
    if not isinstance(v, dict):
        _fail(path, "expected an object {c0, c1, logs}")
    unknown = set(v) - {"c0", "c1", "logs"}
    if unknown:
        _fail(path, f"unknown keys {sorted(unknown)}")
    if "c0" in v:
        _number(v["c0"], f"{path}.c0")
    if "c1" in v and _number(v["c1"], f"{path}.c1") < 0:
        _fail(f"{path}.c1", "must be >= 0")
    for i, t in enumerate(v.get("logs", [])):
        tp = f"{path}.logs[{i}]"
        if not isinstance(t, dict):
            _fail(tp, "expected an object {kappa, eps, poly}")
        if _number(t.get("kappa"), f"{tp}.kappa") < 0:
            _fail(f"{tp}.kappa", "must be >= 0")
        _number(t.get("eps"), f"{tp}.eps", positive=True)
        _poly_literal(t.get("poly"), f"{tp}.poly", nvars)
    return v


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config fields {sorted(unknown)}")
    cfg = RunConfig()
    if "generators" in raw:
        gens = raw["generators"]
        if not isinstance(gens, list) or not gens:
            _fail("generators", "expected a non-empty list of polynomials")
        nv = None
        for i, g in enumerate(gens):
            _poly_literal(g, f"generators[{i}]", nv)
            if nv is None and g:
                nv = len(g[0]["exps"])
        cfg.generators = gens
    nv = cfg.nvars
    for i, g in enumerate(cfg.generators):
        _poly_literal(g, f"generators[{i}]", nv)
    if "f" in raw:
        cfg.f = _poly_literal(raw["f"], "f", nv)
    if "gamma" in raw:
        cfg.gamma = _number(raw["gamma"], "gamma", positive=True)
    if "psi" in raw:
        cfg.psi = _weight(raw["psi"], "psi", nv) or {}
    if "phi" in raw:
        cfg.phi = _weight(raw["phi"], "phi", nv)
    if "domain" in raw and raw["domain"] is not None:
        d = raw["domain"]
        if not isinstance(d, dict):
            _fail("domain", "expected an object {radii, center}")
        radii = d.get("radii", [1.0] * nv)
        if not isinstance(radii, list) or len(radii) != nv:
            _fail("domain.radii", f"expected {nv} radii")
        for i, r in enumerate(radii):
            _number(r, f"domain.radii[{i}]", positive=True)
        if d.get("kind", "polydisc") != "polydisc":
            _fail("domain.kind", "only 'polydisc' is supported")
        if "center" in d and (not isinstance(d["center"], list) or len(d["center"]) != nv):
            _fail("domain.center", f"expected {nv} coordinates")
        cfg.domain = d
    if "grid" in raw:
        g = raw["grid"]
        if not isinstance(g, list) or len(g) != 2:
            _fail("grid", "expected [radial, angular]")
        cfg.grid = [_count(g[0], "grid[0]", 2), _count(g[1], "grid[1]", 2)]
    if "degree" in raw:
        cfg.degree = _count(raw["degree"], "degree")
    if "variant" in raw:
        if raw["variant"] not in VARIANTS:
            _fail("variant", f"expected one of {list(VARIANTS)}, got {raw['variant']!r}")
        cfg.variant = raw["variant"]
    if cfg.variant == "b" and not cfg.phi:
        _fail("phi", "variant 'b' needs a phi weight")
    if "sweep" in raw:
        s = raw["sweep"]
        if not isinstance(s, dict):
            _fail("sweep", "expected an object of counts")
        for k, v in s.items():
            if k not in SWEEP_DEFAULTS:
                _fail(f"sweep.{k}", f"unknown sweep; known: {sorted(SWEEP_DEFAULTS)}")
            cfg.sweep[k] = _count(v, f"sweep.{k}", 1)
    if "iterate" in raw:
        it = raw["iterate"]
        if not isinstance(it, dict):
            _fail("iterate", "expected an object {m0, N0}")
        cfg.iterate = {"m0": _count(it.get("m0", 1), "iterate.m0", 1), "N0": _count(it.get("N0", 1), "iterate.N0", 0)}
    if "tolerances" in raw:
        t = raw["tolerances"]
        if not isinstance(t, dict):
            _fail("tolerances", "expected an object")
        for k, v in t.items():
            if k not in DEFAULT_TOLERANCES:
                _fail(f"tolerances.{k}", f"unknown tolerance; known: {sorted(DEFAULT_TOLERANCES)}")
            cfg.tolerances[k] = _number(v, f"tolerances.{k}", positive=True)
    if "seed" in raw:
        cfg.seed = _count(raw["seed"], "seed")
    try:
        cfg.problem()
    except SkodaError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"config does not define a valid problem: {exc}") from exc
    return cfg


def load_config(path: str | Path | None) -> RunConfig:
    """Parse a JSON config file; None gives the defaults."""
    if path is None:
        return RunConfig()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    return config_from_dict(raw)
