import json
import re

import pytest

from skoda import cli
from skoda.config import RunConfig, config_from_dict, load_config
from skoda.errors import ConfigError

Z2 = [{"coeff": [1.0, 0.0], "exps": [2]}]


def run(tmp_path, argv, cfg=None):
    args = list(argv)
    if cfg is not None:
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        args += ["--config", str(path)]
    out = tmp_path / "report.json"
    code = cli.main([*args, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_divide_default_passes(tmp_path):
    code, rep = run(tmp_path, ["divide"])
    assert code == 0 and rep["exit_code"] == 0
    body = rep["results"]["divide"]
    assert body["status"] == "pass"
    assert rep["schema_version"] == 1
    assert rep["tolerances"] == RunConfig().tolerances


def test_divergent_is_exit_2(tmp_path):
    code, rep = run(tmp_path, ["divide"], {"f": Z2})
    assert code == 2
    assert rep["results"]["divide"]["status"] == "hypothesis_failed"


def test_bad_gamma_is_field_error(tmp_path, capsys):
    code, rep = run(tmp_path, ["divide"], {"gamma": -1})
    assert code == 1 and rep is None
    assert "field 'gamma'" in capsys.readouterr().err


def test_invalid_json_reports_position(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"gamma": 1,\n "degree": }')
    assert cli.main(["divide", "--config", str(path)]) == 1
    assert ":2:" in capsys.readouterr().err


def test_infeasible_is_exit_1(tmp_path):
    cfg = {"generators": [[{"coeff": 1.0, "exps": [1, 0]}], [{"coeff": 1.0, "exps": [0, 1]}]],
           "f": [{"coeff": 1.0, "exps": [2, 0]}], "degree": 0, "grid": [8, 8]}
    code, rep = run(tmp_path, ["divide"], cfg)
    assert code == 1
    assert rep["results"]["divide"]["status"] == "error"
    assert rep["results"]["divide"]["residual"] > 0


def test_grid_flag():
    assert cli._grid("16x8") == [16, 8]
    for bad in ("16", "axb", "1x8"):
        with pytest.raises(Exception):
            cli._grid(bad)


def test_flags_override_config(tmp_path):
    code, rep = run(tmp_path, ["divide", "--grid", "32x16", "--degree", "3", "--seed", "5"])
    assert code == 0
    assert rep["config"]["grid"] == [32, 16] and rep["config"]["degree"] == 3 and rep["seed"] == 5


def test_negative_degree_flag(tmp_path):
    assert cli.main(["divide", "--degree", "-1"]) == 1


def test_iterate_report(tmp_path):
    code, rep = run(tmp_path, ["iterate"])
    body = rep["results"]["iterate"]["summary"]
    assert code == 0 and body["depth"] == body["target_depth"] == 2


def test_report_is_deterministic(tmp_path):
    cfg = {"sweep": {"cs": 50, "wedge": 20, "curvature": 3, "dominate": 5, "identity_54": 20, "variants": 5}}
    a = run(tmp_path, ["cs-sweep"], cfg)[1]
    b = run(tmp_path, ["cs-sweep"], cfg)[1]
    assert a == b


def test_exit_precedence():
    assert cli.EXIT_FAIL == 1 and cli.EXIT_HYPOTHESIS == 2


def test_nonfinite_json():
    assert cli._jsonable({"x": float("inf"), "y": float("nan"), "z": [1 + 2j]}) == {
        "x": "inf", "y": "nan", "z": [[1.0, 2.0]]}


@pytest.mark.parametrize("raw,field", [
    ({"gamma": 0}, "gamma"),
    ({"degree": -1}, "degree"),
    ({"grid": [1, 8]}, "grid[0]"),
    ({"variant": "x"}, "variant"),
    ({"variant": "b"}, "phi"),
    ({"sweep": {"nope": 3}}, "sweep.nope"),
    ({"tolerances": {"cs_slack": -1}}, "tolerances.cs_slack"),
    ({"f": [{"coeff": 1.0, "exps": [1, 2]}]}, "f[0].exps"),
    ({"domain": {"radii": [0]}}, "domain.radii[0]"),
])
def test_config_field_errors(raw, field):
    with pytest.raises(ConfigError, match=re.escape(f"field '{field}'")):
        config_from_dict(raw)


def test_unknown_top_level_field():
    with pytest.raises(ConfigError, match="unknown config fields"):
        config_from_dict({"colour": 1})


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
