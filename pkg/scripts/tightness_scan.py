"""How close the degree-d minimizer gets to the sharp bound.

For G = (z, z^2), f = z^3 and a handful of random problems, prints
weighted_norm / ((1 + q/gamma) C_hat) over a range of gamma. Values below 1
meet the sharp bound; the constructive bound allows up to 2.

    python3 scripts/tightness_scan.py [--random 5] [--seed 0]
"""

import argparse

import numpy as np

from skoda import sweeps
from skoda.division import DivisionProblem, skoda_divide
from skoda.errors import HypothesisFailed

GAMMAS = (0.25, 0.5, 1.0, 2.0, 4.0)


def ratios(G, f, degree, grid):
    row = []
    for gamma in GAMMAS:
        try:
            row.append(skoda_divide(DivisionProblem(G, f, gamma=gamma, degree=degree, grid=grid)).ratio)
        except HypothesisFailed:
            row.append(float("nan"))
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--random", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("problem".ljust(28) + "".join(f"g={g:<8}" for g in GAMMAS))
    G, f = sweeps.skoda_example()
    print("(z, z^2), z^3".ljust(28) + "".join(f"{r:<10.4f}" for r in ratios(G, f, 2, (64, 32))))
    rng = np.random.default_rng(args.seed)
    for i in range(args.random):
        P = sweeps.random_division_problem(rng)
        label = f"random #{i} n={P.G.n} p={P.G.p} d={P.degree}"
        print(label.ljust(28) + "".join(f"{r:<10.4f}" for r in ratios(P.G, P.f, P.degree, P.grid)))


if __name__ == "__main__":
    main()
