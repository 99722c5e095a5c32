import hashlib
import json
import math
import os

import pytest

from logcascade import cli


def run_cli(argv):
    return cli.main(argv)


def test_alpha_analyze_json(tmp_path):
    out = tmp_path / "alpha.json"
    assert run_cli(["alpha", "analyze", "--quotients", "1,100:repeat",
                    "--depth", "7", "--json", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["h_set"] == [1, 3, 5]
    assert [int(r["q"]) for r in d["convergents"]] == \
        [1, 1, 101, 102, 10301, 10403, 1050601, 1061004]
    assert d["bounded_type"] is True
    assert all(d["invariants"].values())


def test_alpha_gauss_csv(tmp_path):
    out = tmp_path / "gauss.csv"
    assert run_cli(["alpha", "gauss", "--ensemble", "40", "--digits", "15",
                    "--seed", "7", "--csv", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "k,frequency,prediction"
    k, freq, pred = lines[1].split(",")
    assert k == "1" and 0 < float(freq) < 1 and float(pred) == pytest.approx(
        math.log2(4 / 3), abs=1e-9)


def test_birkhoff_sum_json(tmp_path):
    out = tmp_path / "sum.json"
    assert run_cli(["birkhoff", "sum", "--level", "3", "--x", "0.3",
                    "--json", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["terms"] == 102
    assert d["excluded"] == 0
    assert math.isfinite(d["value"]) and math.isfinite(d["derivative"])


def test_birkhoff_profile_csv(tmp_path):
    out = tmp_path / "profile.csv"
    assert run_cli(["birkhoff", "profile", "--level", "3", "--cell", "17",
                    "--grid", "32", "--csv", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "x,value,derivative,excluded"
    assert len(lines) == 33
    values = [float(l.split(",")[1]) for l in lines[1:]]
    assert values == sorted(values)  # monotone across the inner cell


def test_lemma_verify_json(tmp_path):
    out = tmp_path / "verify.json"
    assert run_cli(["lemma", "verify", "--level", "3", "--a", "0",
                    "--grid", "16", "--cell", "4", "--json", str(out)]) == 0
    d = json.loads(out.read_text())[0]
    assert d["monotone"] is True
    assert d["thresholds_pass"] == [True, True]


def test_lemma_levelset_csv(tmp_path):
    out = tmp_path / "jset.csv"
    assert run_cli(["lemma", "levelset", "--level", "3", "--a", "0", "--eps",
                    "0.5", "--mode", "exact", "--csv", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "l,left,right,length,midpoint_value"
    assert len(lines) == 103
    mid = float(lines[1].split(",")[4])
    assert abs(mid) <= 0.5


def test_probe_pipeline(tmp_path):
    sets = tmp_path / "sets.json"
    ledger = tmp_path / "ledger.csv"
    assert run_cli(["probe", "build", "--levels", "3,5", "--a", "0", "--eps",
                    "0.9", "--json", str(sets)]) == 0
    assert run_cli(["probe", "holes", "--in", str(sets), "--csv",
                    str(ledger)]) == 0
    lines = ledger.read_text().strip().splitlines()
    assert lines[0] == "stage,hole_left,hole_right,length,class"
    classes = {l.rsplit(",", 1)[1] for l in lines[1:]}
    assert classes <= {"good", "bad"}


def test_probe_witness_json(tmp_path):
    out = tmp_path / "wit.json"
    assert run_cli(["probe", "witness", "--C", "0.1:0.35", "--a", "0",
                    "--eps", "0.5", "--levels", "3", "--json", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["found"] and d["certified"]
    assert 0.1 <= d["x"] <= 0.35


def test_probe_coverage_csv(tmp_path):
    out = tmp_path / "coverage.csv"
    assert run_cli(["probe", "coverage", "--levels", "3,5", "--eps", "0.9",
                    "--csv", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "prefix,level,level_measure,union_measure,conditional"
    u = [float(l.split(",")[3]) for l in lines[1:]]
    assert u == sorted(u)


def test_sim_orbit_csv(tmp_path):
    out = tmp_path / "orbit.csv"
    assert run_cli(["sim", "orbit", "--steps", "5000", "--x0", "0.3",
                    "--y0", "0", "--decimate", "500", "--csv", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "step,x,y,err"
    assert len(lines) == 11


def test_sim_escape_csv(tmp_path):
    out = tmp_path / "escape.csv"
    assert run_cli(["sim", "escape", "--levels", "3", "--M", "1,2",
                    "--samples", "500", "--seed", "11", "--csv",
                    str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "level,M,estimate,half_width,samples"
    assert len(lines) == 3


def test_run_config_and_determinism(tmp_path):
    cfg = {
        "seed": 5,
        "alpha": {"quotients": "1,100:repeat", "depth": 8},
        "observable": "paper",
        "output_dir": str(tmp_path / "out"),
        "stages": [
            {"kind": "alpha", "json": "alpha.json"},
            {"kind": "levelset", "level": 3, "a": 0.0, "eps": 0.5,
             "mode": "exact", "csv": "jset.csv"},
            {"kind": "escape", "levels": "3", "M": "2", "samples": 400,
             "csv": "escape.csv"},
        ],
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert cli.run_config(str(cfg_path)) == 0
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert {a["path"].rsplit("/", 1)[-1] for a in manifest["artifacts"]} == \
        {"alpha.json", "jset.csv", "escape.csv"}
    hashes1 = {a["path"]: a["sha256"] for a in manifest["artifacts"]}
    for path, digest in hashes1.items():
        blob = open(path, "rb").read()
        assert hashlib.sha256(blob).hexdigest() == digest

    # rerun into a second directory: byte-identical artifact bodies
    cfg["output_dir"] = str(tmp_path / "out2")
    cfg_path.write_text(json.dumps(cfg))
    assert cli.run_config(str(cfg_path)) == 0
    manifest2 = json.loads((tmp_path / "out2" / "manifest.json").read_text())
    hashes2 = {os.path.basename(a["path"]): a["sha256"]
               for a in manifest2["artifacts"]}
    for path, digest in hashes1.items():
        assert hashes2[os.path.basename(path)] == digest


def test_run_config_invalid_quotient(tmp_path, capsys):
    cfg = {"alpha": {"quotients": "1,0,5", "depth": 3},
           "output_dir": str(tmp_path),
           "stages": [{"kind": "alpha", "json": "a.json"}]}
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps(cfg))
    assert cli.run_config(str(cfg_path)) == 2
    err = json.loads(capsys.readouterr().err)
    assert "quotients[1]" in err["field"]


def test_run_config_unknown_stage(tmp_path, capsys):
    cfg = {"output_dir": str(tmp_path), "stages": [{"kind": "nonsense"}]}
    cfg_path = tmp_path / "bad2.json"
    cfg_path.write_text(json.dumps(cfg))
    assert cli.run_config(str(cfg_path)) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["field"] == "stages[0].kind"


def test_alpha_levy_csv(tmp_path):
    out = tmp_path / "levy.csv"
    assert run_cli(["alpha", "levy", "--ensemble", "30", "--depth", "25",
                    "--seed", "7", "--csv", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "sample,log_q_over_n"
    assert len(lines) == 31


def test_birkhoff_sum_with_files(tmp_path):
    alpha = tmp_path / "a.json"
    alpha.write_text(json.dumps({"quotients": "1,100:repeat", "depth": 6}))
    phi = tmp_path / "phi.json"
    phi.write_text(json.dumps({"x0": 0.0, "cL": 1.0, "cR": 1.0, "trig": [],
                               "constant": -2.0, "mean_zero": True}))
    out = tmp_path / "sum.json"
    assert run_cli(["birkhoff", "sum", "--alpha-file", str(alpha),
                    "--phi-file", str(phi), "--level", "5", "--x", "0.3",
                    "--json", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["terms"] == 10403 and math.isfinite(d["value"])


def test_probe_coverage_from_sets_file(tmp_path):
    sets = tmp_path / "sets.json"
    cov = tmp_path / "cov.csv"
    assert run_cli(["probe", "build", "--levels", "3,5", "--eps", "0.9",
                    "--window", "0.0:0.2", "--json", str(sets)]) == 0
    assert run_cli(["probe", "coverage", "--in", str(sets), "--csv",
                    str(cov)]) == 0
    lines = cov.read_text().strip().splitlines()
    assert len(lines) == 3


def test_symmetric_phi_by_name(tmp_path):
    out = tmp_path / "esc.csv"
    assert run_cli(["sim", "escape", "--levels", "3", "--M", "20",
                    "--samples", "300", "--phi", "symmetric", "--csv",
                    str(out)]) == 0
    est = float(out.read_text().strip().splitlines()[1].split(",")[2])
    assert est >= 0.5


def test_csv_rejects_non_finite(tmp_path):
    with pytest.raises(ValueError):
        cli.write_csv(str(tmp_path / "bad.csv"), ["a"], [(float("inf"),)])


def test_atomic_write_no_partial_file(tmp_path):
    target = tmp_path / "x.json"
    cli.write_json(str(target), {"ok": True})
    assert json.loads(target.read_text()) == {"ok": True}
    leftovers = [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")]
    assert not leftovers
