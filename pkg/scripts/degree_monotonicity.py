"""Weighted norm of the minimizer as the ansatz degree grows.

    python3 scripts/degree_monotonicity.py [--max-degree 6]

The norm is non-increasing in d. For G = (z, z^2), f = z^3 it is already
minimal at d = 2, so the column is flat.
"""

import argparse

import numpy as np

from skoda import sweeps
from skoda.division import DivisionProblem, skoda_divide


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-degree", type=int, default=6)
    ap.add_argument("--random", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    G, f = sweeps.skoda_example()
    problems = [("(z, z^2), z^3", G, f, 2, 1.0, (64, 32))]
    rng = np.random.default_rng(args.seed)
    for i in range(args.random):
        P = sweeps.random_division_problem(rng)
        problems.append((f"random #{i} (n={P.G.n})", P.G, P.f, P.degree, P.gamma, P.grid))
    for label, G, f, d0, gamma, grid in problems:
        print(label)
        top = args.max_degree if G.n == 1 else min(args.max_degree, d0 + 2)
        prev = None
        for d in range(d0, top + 1):
            sol = skoda_divide(DivisionProblem(G, f, gamma=gamma, degree=d, grid=grid))
            step = "" if prev is None else f"  change {sol.weighted_norm - prev:+.3e}"
            print(f"  d={d}  norm={sol.weighted_norm:.12g}  syzygies={sol.n_syzygies}{step}")
            prev = sol.weighted_norm


if __name__ == "__main__":
    main()
