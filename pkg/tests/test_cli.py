import json

import pytest

from pseudomeasure.cli import load_schema, main
from pseudomeasure.scenarios import SCENARIOS


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_list(capsys):
    assert main(["list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert [ln.split()[0] for ln in lines] == list(SCENARIOS)
    assert len(lines) == 7
    assert main(["list", "--json"]) == 0
    names = [d["name"] for d in json.loads(capsys.readouterr().out)]
    assert names == ["remark7", "wiener-validate", "theorem3-strong", "theorem4-weak",
                     "theorem1-limits", "young-oscillation", "property-suite"]


def test_unknown_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["list", "--nope"])
    assert exc.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_schema_enumerates_scenarios():
    assert load_schema()["properties"]["scenario"]["enum"] == list(SCENARIOS)


@pytest.mark.parametrize("cfg", [
    {"schema_version": 1, "scenario": "remark7", "extra": True},
    {"schema_version": 2, "scenario": "remark7"},
    {"schema_version": 1, "scenario": "nope"},
    {"schema_version": 1, "scenario": "remark7", "grid": {"N": 0}},
])
def test_malformed_config(tmp_path, capsys, cfg):
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, cfg), "--out", str(out)]) == 1
    assert not out.exists()
    assert "at /" in capsys.readouterr().err


def test_unreadable_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", str(bad), "--out", str(tmp_path / "o")]) == 1
    assert main(["run", str(tmp_path / "missing.json")]) == 1


def test_semantic_error_leaves_no_outputs(tmp_path):
    cfg = {"schema_version": 1, "scenario": "remark7", "measure": {"kind": "weights", "weights": [0.2, 0.2]}}
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, cfg), "--out", str(out)]) == 1
    assert not out.exists() or not any(out.iterdir())


def test_remark7_outputs(tmp_path):
    out = tmp_path / "r7"
    cfg = {"schema_version": 1, "scenario": "remark7", "output_dir": str(out)}
    assert main(["run", write(tmp_path, cfg)]) == 0
    rows = (out / "remark7_mean_evolution.csv").read_text().splitlines()
    assert rows[0] == "t,re_mean,im_mean,cos_t"
    for row in rows[1:]:
        t, re, im, c = map(float, row.split(","))
        assert abs(re - c) < 1e-12 and abs(im) < 1e-12
    report = json.loads((out / "remark7_report.json").read_text())
    assert report["memory_defect_half_pi"] == pytest.approx(1.0, abs=1e-9)
    assert (out / "remark7_memory_defect.csv").exists()


def test_wiener_validate_exit_codes(tmp_path):
    base = {"schema_version": 1, "scenario": "wiener-validate", "seed": 3,
            "budgets": {"n_paths": 20000, "n_cylinders": 2}}
    assert main(["run", write(tmp_path, base), "--out", str(tmp_path / "ok")]) == 0
    data = json.loads((tmp_path / "ok" / "wiener_validate.json").read_text())
    assert {"eval", "mc_value", "mc_stderr", "z_score", "n_paths", "seed"} <= set(data["cylinders"][0])
    # a cylinder whose exact value is deliberately mismatched by a wrong grid
    wrong = dict(base, grid={"N": 4}, cylinders=[{"times": [0.0, 0.02], "bases": [[0], [0]]}])
    assert main(["run", write(tmp_path, wrong, "w.json"), "--out", str(tmp_path / "bad")]) == 2
    assert (tmp_path / "bad" / "wiener_validate.json").exists()


def test_rerun_byte_identical(tmp_path):
    cfg = {"schema_version": 1, "scenario": "theorem1-limits", "seed": 5}
    path = write(tmp_path, cfg)
    assert main(["run", path, "--out", str(tmp_path / "a")]) == 0
    assert main(["run", path, "--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "theorem1_limits.json").read_bytes()
    assert a == (tmp_path / "b" / "theorem1_limits.json").read_bytes()


def test_suite_filter(tmp_path, capsys):
    assert main(["suite", "--filter", "grid-space", "--out", str(tmp_path / "s")]) == 0
    data = json.loads((tmp_path / "s" / "property_suite.json").read_text())
    assert data["n_checks"] == 3 and data["passed"]
