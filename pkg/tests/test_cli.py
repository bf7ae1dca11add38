from __future__ import annotations

import json

import pytest

from czc.catalog import ellipsoid, sphere_spec
from czc.cli import main


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


@pytest.fixture
def e12_files(tmp_path):
    spec, data = ellipsoid(["1", "sqrt2"])
    return write(tmp_path, "spec.json", spec.to_json()), write(tmp_path, "orbits.json", data.to_json())


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_betti_s3(tmp_path, capsys):
    path = write(tmp_path, "s3.json", sphere_spec(1).to_json())
    code, out, _ = run(capsys, ["betti", "--spec", path, "--range", "0:11"])
    assert code == 0
    ranks = {r["k"]: r["rank"] for r in json.loads(out)["ranks"]}
    assert [k for k, v in ranks.items() if v] == [3, 5, 7, 9, 11]
    assert set(ranks.values()) == {0, 1}
    code, out, _ = run(capsys, ["betti", "--spec", path, "--range", "0:11", "--format", "table"])
    assert code == 0 and "rank" in out


def test_chi(e12_files, capsys):
    spec, orbits = e12_files
    code, out, _ = run(capsys, ["chi", "--spec", spec, "--orbits", orbits])
    obj = json.loads(out)
    assert code == 0 and obj["chi_plus"] == "-1/2" and obj["k_min"] == 3 and obj["r_B"] == 2
    assert [o["mean_chi"] for o in obj["orbits"]] == ["-1", "-1"]


def test_indices(e12_files, capsys):
    _, orbits = e12_files
    code, out, _ = run(capsys, ["indices", "--orbits", orbits, "--k", "1:3"])
    obj = json.loads(out)
    assert code == 0
    assert [it["mu"] for it in obj["orbits"][0]["iterates"]] == [3, 7, 11]
    assert [it["mu"] for it in obj["orbits"][1]["iterates"]][0] == 5
    code, _, err = run(capsys, ["indices", "--orbits", orbits, "--k", "0:3"])
    assert code == 2 and "k = 1" in err


def test_jump_and_verify(e12_files, tmp_path, capsys):
    _, orbits = e12_files
    base = ["jump", "--orbits", orbits, "--eta", "1/2", "--ell0", "2", "--N", "4"]
    code, out, _ = run(capsys, base)
    certs = json.loads(out)
    assert code == 0 and certs["plus"]["d"] == 232 and certs["plus"]["k"] == [68, 48]
    good = write(tmp_path, "certs.json", certs)
    code, out, _ = run(capsys, base + ["--verify", good])
    assert code == 0 and json.loads(out)["ok"]
    certs["plus"]["d"] += 2
    bad = write(tmp_path, "bad.json", certs)
    code, out, _ = run(capsys, base + ["--verify", bad])
    assert code == 1 and not json.loads(out)["ok"]
    code, _, err = run(capsys, base + ["--bound", "3"])
    assert code == 3 and "3" in err


def test_census_exit_codes(e12_files, tmp_path, capsys):
    spec, orbits = e12_files
    code, out, _ = run(capsys, ["census", "--spec", spec, "--orbits", orbits])
    assert code == 0 and json.loads(out)["verdict"] == "Certified"
    data = json.loads(open(orbits).read())
    data["orbits"] = data["orbits"][:1]
    short = write(tmp_path, "short.json", data)
    code, out, err = run(capsys, ["census", "--spec", spec, "--orbits", short])
    assert code == 1 and json.loads(out)["first_violation"]["degree"] == 5 and "first violation" in err
    broken = write(tmp_path, "broken.json", '{"n": 1, "orbits": [')
    code, _, err = run(capsys, ["census", "--spec", spec, "--orbits", broken])
    assert code == 2 and "line 1" in err
    code, out, _ = run(capsys, ["census", "--spec", spec, "--orbits", orbits, "--bound", "3"])
    assert code == 3 and json.loads(out)["verdict"] == "Inconclusive"
    code, out, _ = run(capsys, ["census", "--spec", spec, "--orbits", short, "--mode", "lower-bound"])
    assert code == 3 and json.loads(out)["forced_lower_bound"] == 2


def test_census_output_byte_identical(e12_files, capsys):
    spec, orbits = e12_files
    outs = {run(capsys, ["census", "--spec", spec, "--orbits", orbits])[1] for _ in range(3)}
    assert len(outs) == 1
    code, out, _ = run(capsys, ["census", "--spec", spec, "--orbits", orbits, "--format", "table"])
    assert code == 0 and "verdict: Certified" in out and "FAIL" not in out


def test_input_errors(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    code, _, err = run(capsys, ["betti", "--spec", missing, "--range", "0:3"])
    assert code == 2 and "nope.json" in err
    bad = write(tmp_path, "bad.json", {"n": 1, "c_B": 2, "sign": "positive", "betti": [1, 0, 3]})
    code, _, err = run(capsys, ["betti", "--spec", bad, "--range", "0:3"])
    assert code == 2 and "duality" in err
    good = write(tmp_path, "good.json", sphere_spec(1).to_json())
    code, _, _ = run(capsys, ["betti", "--spec", good, "--range", "5:3"])
    assert code == 2
    with pytest.raises(SystemExit):
        main(["betti"])


def test_catalog_round_trip(tmp_path, capsys):
    code, out, _ = run(capsys, ["catalog", "ellipsoid", "--axes", "1,sqrt2,sqrt3"])
    assert code == 0
    bundle = write(tmp_path, "bundle.json", out)
    code, out, _ = run(capsys, ["census", "--spec", bundle, "--orbits", bundle])
    assert code == 0 and json.loads(out)["verdict"] == "Certified"
    code, out, _ = run(capsys, ["catalog", "lens", "--p", "3", "--weights", "1,2", "--axes", "1,sqrt2"])
    lensf = write(tmp_path, "lens.json", out)
    assert run(capsys, ["census", "--spec", lensf, "--orbits", lensf])[0] == 0
    assert run(capsys, ["resonance", "--spec", lensf, "--orbits", lensf])[0] == 0


def test_catalog_table_and_spec(capsys):
    code, out, _ = run(capsys, ["catalog", "table"])
    rows = json.loads(out)["rows"]
    assert code == 0 and len(rows) == 7 and rows[-1] == {"name": "S*CaP^2", "r_B": "24", "c_B": "11"}
    code, out, _ = run(capsys, ["catalog", "table", "--format", "table"])
    assert "S*HP^m" in out and "2m(m+1)" in out
    code, out, _ = run(capsys, ["catalog", "spec", "S*S^5"])
    assert code == 0 and json.loads(out)["spec"]["c_B"] == 4
    code, _, err = run(capsys, ["catalog", "spec", "S*CP^2"])
    assert code == 2 and "profile" in err
    code, _, err = run(capsys, ["catalog", "spec", "T^2"])
    assert code == 2 and "unknown catalog name" in err
    code, _, err = run(capsys, ["catalog", "ellipsoid", "--axes", "1,2"])
    assert code == 2


def test_resonance_mismatch(e12_files, tmp_path, capsys):
    spec, orbits = e12_files
    data = json.loads(open(orbits).read())
    data["orbits"] = data["orbits"][1:]
    short = write(tmp_path, "short.json", data)
    code, out, _ = run(capsys, ["resonance", "--spec", spec, "--orbits", short])
    assert code == 1 and json.loads(out)["equal"] is False


@pytest.mark.parametrize("cmd", ["betti", "chi", "indices", "jump", "census", "catalog", "resonance"])
def test_help_carries_schema(cmd, capsys):
    with pytest.raises(SystemExit) as info:
        main([cmd, "--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    assert "output" in out
    if cmd not in ("catalog",):
        assert "file:" in out
