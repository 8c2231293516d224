"""Compare C_hat with the three variant constants on the worked example.

    python3 scripts/variant_constants.py

Variant c needs |g| < 1 on the domain, so it is only reported for small radii.
"""

import math

from skoda import sweeps
from skoda.division import DivisionProblem, skoda_divide
from skoda.errors import PreconditionError
from skoda.psh import PshWeight
from skoda.quadrature import Domain

RADII = (0.5, 0.6, 0.7, 1.0, 1.2)


def run(G, f, R, variant, **kw):
    try:
        sol = skoda_divide(DivisionProblem(G, f, domain=Domain((R,)), variant=variant, **kw))
    except PreconditionError:
        return math.nan, math.nan
    return sol.constant, sol.weighted_norm


def main():
    G, f = sweeps.skoda_example()
    print(f"{'R':>5} {'norm':>12} {'C_hat':>12} {'C1':>12} {'C2':>12} {'C3':>12}")
    for R in RADII:
        ch, norm = run(G, f, R, "skoda")
        c1, _ = run(G, f, R, "a")
        c2, _ = run(G, f, R, "b", phi=PshWeight(c1=1.0))
        c3, _ = run(G, f, R, "c")
        print(f"{R:5.2f} {norm:12.6g} {ch:12.6g} {c1:12.6g} {c2:12.6g} {c3:12.6g}")


if __name__ == "__main__":
    main()
