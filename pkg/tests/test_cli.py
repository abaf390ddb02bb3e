import json

import jsonschema
import pytest

from khibound.cli import main, record_schema
from khibound.knot_io import lookup


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bound_golden(capsys):
    assert run(capsys, "bound", "3_1") == (0, "upper=3 lower=3 sharp\n", "")
    assert run(capsys, "bound", "unknot")[1] == "upper=1 lower=1 sharp\n"
    assert run(capsys, "bound", "7_7", "--strategy", "exhaustive")[1] == "upper=21 lower=21 sharp\n"


def test_bound_pd_and_dt(capsys):
    pd = lookup("4_1").serialize()
    assert run(capsys, "bound", pd)[1] == "upper=5 lower=5 sharp\n"
    assert run(capsys, "bound", "4 6 2", "--dt")[1] == "upper=3 lower=3 sharp\n"


def test_bound_json_validates(capsys):
    code, out, _ = run(capsys, "bound", "5_2", "--format", "json")
    rec = json.loads(out)
    jsonschema.validate(rec, record_schema())
    assert rec["upper"] == rec["lower"] == 7 and rec["sharp"]


def test_bound_certificate_and_replay(capsys, tmp_path):
    cert = tmp_path / "c.cert"
    run(capsys, "bound", "4_1", "--cert", str(cert))
    assert cert.read_text().startswith("khibound-certificate 1")
    assert run(capsys, "replay", str(cert)) == (0, "bound=5 knot=4_1 verified=True\n", "")
    assert run(capsys, "replay", str(cert), "--knot", "4_1")[0] == 0
    code, _, err = run(capsys, "replay", str(cert), "--knot", "3_1")
    assert code == 5 and "CertificateMismatch" in err


def test_budget_exit_code(capsys):
    code, out, _ = run(capsys, "bound", "6_2", "--node-budget", "1")
    assert code == 2 and "budget-exhausted" in out


def test_cache(capsys, tmp_path):
    a = run(capsys, "bound", "5_1", "--cache-dir", str(tmp_path), "--format", "json")
    assert len(list(tmp_path.iterdir())) == 1
    b = run(capsys, "bound", "5_1", "--cache-dir", str(tmp_path), "--format", "json")
    assert json.loads(a[1])["upper"] == json.loads(b[1])["upper"] == 5


def test_env_overrides(capsys, monkeypatch):
    monkeypatch.setenv("KHIBOUND_NODE_BUDGET", "1")
    assert run(capsys, "bound", "6_2")[0] == 2
    # flags win over the environment
    assert run(capsys, "bound", "6_2", "--node-budget", "1000000")[0] == 0


def test_input_errors(capsys):
    assert run(capsys, "bound", "not_a_knot")[0] == 4
    assert run(capsys, "bound", "[[1,2,3]]")[0] == 3
    assert run(capsys, "bound", "3_1", "--rules", "V7")[0] == 3


def test_alexander(capsys):
    assert run(capsys, "alexander", "7_2")[1] == "3t - 5 + 3t^-1  (lower=11)\n"
    out = json.loads(run(capsys, "alexander", "6_3", "--format", "json")[1])
    assert out["lower"] == 13 and out["coefficients"]["0"] == 5


def test_build(capsys, tmp_path):
    dump = tmp_path / "s.txt"
    code, out, _ = run(capsys, "build", "3_1", "--dump", str(dump), "--format", "json")
    row = json.loads(out)
    assert row["genus"] == 4 and row["gamma_components"] == 5 and row["euler_plus_minus"] == [-3, -3]
    assert dump.read_text().startswith("curvesystem 1")


def test_surgery(capsys):
    assert run(capsys, "surgery", "--genus", "2", "--slope", "3/1")[1] == "genus=2 slope=3/1 scenario1=3 scenario2=9\n"
    assert run(capsys, "surgery", "--genus", "2", "--slope=-3/1")[1] == "genus=2 slope=-3/1 scenario1=9 scenario2=3\n"
    code, _, err = run(capsys, "surgery", "--genus", "1", "--slope", "1/1")
    assert code == 3 and "InvalidGenus" in err
    assert run(capsys, "surgery", "--genus", "2", "--slope", "2/4")[0] == 3


def test_surgery_table(capsys):
    code, out, _ = run(capsys, "surgery-table", "--genus", "3", "--slopes=-1:1/1:2", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "genus,slope,scenario1,scenario2"
    assert "3,1/2,19,21" in lines and len(lines) == 1 + 5


@pytest.mark.slow
def test_table(capsys, tmp_path):
    fig = tmp_path / "t.png"
    out_csv = tmp_path / "t.csv"
    code, out, err = run(capsys, "table", "--format", "json", "--figure", str(fig), "--out", str(out_csv))
    rows = json.loads(out)
    assert code == 0 and "15/15 small-knot rows match" in err
    for r in rows:
        jsonschema.validate(r, record_schema())
    assert fig.stat().st_size > 1000
    assert out_csv.read_text().splitlines()[0].startswith("knot,pd_hash,upper")
