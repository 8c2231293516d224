"""Run the eleven acceptance checks directly and print one line per criterion.

    python3 scripts/run_acceptance.py [--json out.json]

Same checks as tests/test_acceptance.py, without pytest.
"""

import argparse
import json
import math
import time

from skoda import cli, sweeps
from skoda.division import DivisionProblem, skoda_divide
from skoda.errors import HypothesisFailed


def divergent_path():
    G, _ = sweeps.skoda_example()
    try:
        skoda_divide(DivisionProblem(G, G.g[1], gamma=1.0, degree=2))
    except HypothesisFailed as exc:
        return sweeps.SweepResult("divergent", {"levels": list(exc.values)}, [sweeps.Check("flagged", True, 1, 1)])
    return sweeps.SweepResult("divergent", {}, [sweeps.Check("flagged", False, 0, 1)])


CRITERIA = [
    (1, "tensor CS suite", lambda: sweeps.cs_sweep(10_000, 0), 10.0),
    (2, "wedge/tensor equivalence", lambda: sweeps.wedge_sweep(1000, 0), None),
    (3, "dual-oracle curvature", lambda: sweeps.curvature_sweep(100, 0), 60.0),
    (4, "twisted curvature domination", lambda: sweeps.dominate_sweep(100, 0), None),
    (5, "fiber trace identity", lambda: sweeps.identity54_sweep(1000, 0), None),
    (6, "variant matrix inequalities", lambda: sweeps.variants_sweep(200, 0), None),
    (7, "quadrature oracles", lambda: sweeps.quadrature_oracles((256, 256)), None),
    (8, "division example", sweeps.skoda_division_example, 30.0),
    (9, "division properties", lambda: sweeps.division_properties(20, 0), None),
    (10, "iterated division", sweeps.iterate_check, None),
    (11, "hypothesis-failure path", divergent_path, None),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", help="also write the per-criterion results here")
    args = ap.parse_args()
    out, all_ok = {}, True
    for number, title, fn, limit in CRITERIA:
        t0 = time.perf_counter()
        res = fn()
        dt = time.perf_counter() - t0
        ok = res.passed and (limit is None or dt < limit)
        all_ok &= ok
        print(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title} ({dt:.2f}s)")
        out[number] = {"title": title, "passed": ok, "seconds": dt, **res.to_dict()}
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(cli._jsonable(out), fh, indent=2, sort_keys=True)
    raise SystemExit(0 if all_ok else 1)


if __name__ == "__main__":
    main()
