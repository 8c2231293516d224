"""Desk-scale numerics for division in polynomial ideals with weighted L^2 bounds.

The supporting pieces are tensor Cauchy-Schwarz checks and the curvature of
the kernel of (g_1, ..., g_p), both verified against independent oracles.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DomainError,
    HypothesisFailed,
    InfeasibleError,
    PreconditionError,
    ShapeError,
    SingularityError,
    SkodaError,
)
from .holo import GeneratorSystem  # noqa: E402
from .poly import MultiPoly  # noqa: E402
from .psh import PshWeight  # noqa: E402

__all__ = [
    "ConfigError",
    "DomainError",
    "GeneratorSystem",
    "HypothesisFailed",
    "InfeasibleError",
    "MultiPoly",
    "PreconditionError",
    "PshWeight",
    "ShapeError",
    "SingularityError",
    "SkodaError",
    "__version__",
]
