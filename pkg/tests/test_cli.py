import json

import pytest

from psdetect.cli import main, parse_grid
from psdetect.data import write_table_json, yerushalmy
from psdetect.errors import ConfigConflictError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_detect_monotone_yerushalmy(capsys):
    code, out, _ = run(capsys, "detect", "--data", "yerushalmy", "--assume-monotone-m")
    doc = json.loads(out)
    assert code == 2
    assert len(doc["reports"]) == 4
    assert not any(r["significant"] for r in doc["reports"])
    assert all(r["monotone_assumed"] and "p_value" in r for r in doc["reports"])


def test_detect_randomization_only(capsys):
    code, out, _ = run(capsys, "detect", "--data", "yerushalmy")
    assert code == 2
    assert not any(r["detected"] for r in json.loads(out)["reports"])


def test_detect_swapped_roles_finds_effect(capsys):
    code, out, _ = run(capsys, "detect", "--data", "yerushalmy", "--assume-monotone-m", "--swap-roles", "--one-sided")
    doc = json.loads(out)
    assert code == 0
    (hit,) = [r for r in doc["reports"] if r["significant"]]
    assert (hit["target"]["y"], hit["target"]["m"]) == (0, 0)
    assert hit["ci"]["lower"] == pytest.approx(0.0239, abs=1e-4)


def test_reproduce(capsys):
    code, out, _ = run(capsys, "reproduce", "yerushalmy")
    rows = json.loads(out)["rows"]
    assert code == 0
    assert [r["estimate"] for r in rows] == pytest.approx([-0.104, -0.0001, -0.031, 0.031], abs=1e-3)
    assert [r["ci"]["lower"] for r in rows] == pytest.approx([-0.175, -0.003, -0.038, 0.024], abs=1e-3)


def test_reproduce_tsv(capsys):
    code, out, _ = run(capsys, "reproduce", "yerushalmy", "--output", "tsv")
    lines = out.strip().split("\n")
    assert code == 0 and len(lines) == 5 and lines[0].startswith("quantity\testimate")


def test_output_is_byte_identical(capsys):
    _, a, _ = run(capsys, "detect", "--data", "yerushalmy", "--assume-monotone-m", "--bootstrap", "200", "--seed", "3")
    _, b, _ = run(capsys, "detect", "--data", "yerushalmy", "--assume-monotone-m", "--bootstrap", "200", "--seed", "3")
    assert a == b
    assert json.loads(a)["reports"][0]["ci"]["method"] == "bootstrap"


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--seed", "7", "--n", "1000", "--check-identities")
    doc = json.loads(out)
    assert code == 0 and doc["all_passed"]
    assert doc["populations"] == doc["monotone_populations"] == 1000


def test_bound_single_target_from_file(tmp_path, capsys):
    path = tmp_path / "t.json"
    write_table_json(yerushalmy(), path)
    code, out, _ = run(capsys, "bound", "--data", str(path), "--y", "1", "--m", "1",
                       "--assume-monotone-m", "--denominator", "exact")
    (rep,) = json.loads(out)["reports"]
    assert code == 0
    assert rep["statistic_exact"] == "-116711/3767607" and rep["mode"] == "exact-monotone"


def test_bound_needs_both_targets(capsys):
    code, _, err = run(capsys, "bound", "--data", "yerushalmy", "--y", "1")
    assert code == 1 and "--m" in err


def test_sensitivity_requires_monotone_flag(capsys):
    code, _, err = run(capsys, "sensitivity", "--data", "yerushalmy", "--y", "1", "--m", "1", "--r-grid", "0:0.02:0.01")
    assert code == 1 and "assume-monotone-m" in err


def test_sensitivity_sweep(capsys):
    code, out, _ = run(capsys, "sensitivity", "--data", "yerushalmy", "--y", "1", "--m", "1",
                       "--assume-monotone-m", "--r-grid=-0.031:0:0.0155", "--q-grid", "0:0.1:0.05")
    rows = json.loads(out)["rows"]
    assert code == 0 and len(rows) == 9
    assert sum(not r["valid"] for r in rows) == 3  # q = 0.1 exceeds P(M=1|X=1)
    assert rows[0]["adjusted"] == pytest.approx(0.0, abs=1e-3)


def test_grid_on_other_command_conflicts(capsys):
    code, _, err = run(capsys, "bound", "--data", "yerushalmy", "--r-grid", "0:1:0.5")
    assert code == 1 and "sensitivity" in err


def test_pleiotropy_command(tmp_path, capsys):
    path = tmp_path / "p.csv"
    rows = ["x,y,z"] + ["1,1,1"] * 40 + ["1,0,0"] * 10 + ["0,0,0"] * 45 + ["0,1,1"] * 5
    path.write_text("\n".join(rows) + "\n")
    code, out, _ = run(capsys, "pleiotropy", "--data", str(path), "--variant", "1")
    (rep,) = json.loads(out)["reports"]
    assert code == 0 and rep["detected"] and rep["significant"]
    assert rep["statistic"] == pytest.approx(0.8 + 0.9 - 1)
    assert any("mediated" in n for n in rep["notes"])


def test_pleiotropy_rejects_bundled_dataset(capsys):
    code, _, _ = run(capsys, "pleiotropy", "--data", "yerushalmy")
    assert code == 1


def test_coarsen_and_region_bound(tmp_path, capsys):
    data = tmp_path / "d.csv"
    data.write_text("x,y1,m1\n1,1,2000\n1,0,3000\n0,1,,\n0,0,2400\n")
    region = tmp_path / "r.json"
    region.write_text(json.dumps({"y": {"coords": [{"index": 0, "categories": [1]}]},
                                  "m": {"coords": [{"index": 0, "interval": [0, 2500]}]}}))
    code, out, _ = run(capsys, "coarsen", "--data", str(data), "--region", str(region))
    assert code == 0
    doc = json.loads(out)
    assert doc["x1"] == {"m1y1": 1, "m1y0": 0, "m0y1": 0, "m0y0": 1}
    assert doc["x0"] == {"m1y1": 0, "m1y0": 1, "m0y1": 1, "m0y0": 0}
    code, out, _ = run(capsys, "bound", "--data", str(data), "--region", str(region))
    assert code == 0 and "set-membership" in json.loads(out)["reports"][0]["basis"]


def test_bad_input_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "detect", "--data", str(path))
    assert code == 1 and "error" in err


def test_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["detect"])
    assert exc.value.code == 1


def test_parse_grid():
    assert parse_grid("0:0.1:0.05") == [0, pytest.approx(0.05), pytest.approx(0.1)]
    assert parse_grid("0.25") == [0.25]
    with pytest.raises(ConfigConflictError):
        parse_grid("1:0:0.1")
