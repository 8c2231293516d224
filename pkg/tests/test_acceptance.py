"""The eleven acceptance criteria at their stated tolerances.

Each test records one line for the terminal summary, printed as
``[PASS|FAIL] N. title: detail`` at the end of the run.
"""

import json
import math
import time

from skoda import cli
from skoda import sweeps


def _detail(res, elapsed=None):
    parts = [f"{c.name}={c.value:.3g}" if isinstance(c.value, float) else f"{c.name}={c.value}" for c in res.checks]
    if elapsed is not None:
        parts.append(f"time={elapsed:.2f}s")
    return ", ".join(parts)


def _timed(fn, *args, **kw):
    t0 = time.perf_counter()
    res = fn(*args, **kw)
    return res, time.perf_counter() - t0


def test_01_tensor_cs(record):
    res, dt = _timed(sweeps.cs_sweep, 10_000, 0, max_dim=6)
    ok = res.passed and dt < 10.0
    record(1, "tensor CS suite (10^4 pairs, < 10 s)", ok, _detail(res, dt))
    assert ok


def test_02_wedge_tensor_equivalence(record):
    res = sweeps.wedge_sweep(1000, 0, max_p=5, max_n=4)
    record(2, "wedge/tensor equivalence (10^3 triples)", res.passed, _detail(res))
    assert res.passed


def test_03_curvature_dual_oracle(record):
    res, dt = _timed(sweeps.curvature_sweep, 100, 0, max_n=3, max_p=3, max_degree=3)
    ok = res.passed and dt < 60.0 and res.summary["instances"] >= 100
    record(3, "dual-oracle curvature (100 instances, < 60 s)", ok, _detail(res, dt))
    assert ok


def test_04_domination(record):
    res = sweeps.dominate_sweep(100, 0)
    record(4, "twisted curvature domination", res.passed, _detail(res))
    assert res.passed


def test_05_identity(record):
    res = sweeps.identity54_sweep(1000, 0)
    record(5, "fiber trace identity (10^3 instances)", res.passed, _detail(res))
    assert res.passed


def test_06_variant_matrices(record):
    res = sweeps.variants_sweep(200, 0)
    record(6, "variant matrix inequalities (a) and (c)", res.passed, _detail(res))
    assert res.passed


def test_07_quadrature_oracles(record):
    res = sweeps.quadrature_oracles(grid=(256, 256))
    record(7, "quadrature oracles and C_hat = 3 pi / 8 at 256x256", res.passed, _detail(res))
    assert res.passed


def test_08_division_example(record):
    res, dt = _timed(sweeps.skoda_division_example)
    s = res.summary
    ok = res.passed and dt < 30.0
    detail = (f"norm={s['weighted_norm']:.12g} (pi/2={math.pi / 2:.12g}), "
              f"bounds {s['bound_theorem']:.6g} / {s['bound_constructive']:.6g}, " + _detail(res, dt))
    record(8, "division example G=(z,z^2), f=z^3 (< 30 s)", ok, detail)
    assert ok


def test_09_division_properties(record):
    res = sweeps.division_properties(20, 0)
    record(9, "division properties on 20 random problems", res.passed, _detail(res))
    assert res.passed


def test_10_iterated_division(record):
    res = sweeps.iterate_check()
    record(10, "iterated division re-expansion (3 examples)", res.passed, _detail(res))
    assert res.passed


def test_11_hypothesis_failure_path(record, tmp_path):
    cfg = tmp_path / "divergent.json"
    cfg.write_text(json.dumps({"f": [{"coeff": [1.0, 0.0], "exps": [2]}]}))
    out = tmp_path / "report.json"
    code = cli.main(["divide", "--config", str(cfg), "--out", str(out)])
    body = json.loads(out.read_text())["results"]["divide"]
    flagged = sweeps.divergent_example_flagged()
    ok = code == cli.EXIT_HYPOTHESIS and body["status"] == "hypothesis_failed" and flagged
    ok = ok and "weighted_norm" not in body and "bound_theorem" not in body
    record(11, "f = z^2 flagged divergent, exit code 2", ok, f"exit={code}, status={body['status']}")
    assert ok
