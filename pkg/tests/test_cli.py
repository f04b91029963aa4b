import json

import pytest

from etrarm.cli import parse_assignment, run, UsageError
from etrarm.arm import deserialize, serialize, ArmInstance
from etrarm.gadgets import emit_gauge

PRODUCT_SUM = "x*y - 6 = 0 /\\ x + y - 5 = 0\n"


@pytest.fixture
def compiled(tmp_path):
    src = tmp_path / "f.etr"
    src.write_text(PRODUCT_SUM)
    inst = tmp_path / "f.arm.json"
    assert run(["--quiet", "compile", str(src), "-o", str(inst)]) == 0
    return tmp_path, inst


def test_parse_assignment():
    assert parse_assignment("x=2, y=-3/4") == {"x": 2, "y": pytest.approx(-0.75)}
    for bad in ("x=1/0", "x", "x=1,x=2", "x=0.5"):
        with pytest.raises(UsageError):
            parse_assignment(bad)


def test_compile_witness_verify(compiled, capsys):
    tmp, inst = compiled
    wit = tmp / "w.json"
    assert run(["witness", str(inst), "--assign", "x=2,y=3", "-o", str(wit)]) == 0
    capsys.readouterr()
    assert run(["verify", str(inst), str(wit)]) == 0
    out, err = capsys.readouterr()
    verdict = json.loads(out)
    assert verdict["accept"] is True and verdict["rank"] == 3 and verdict["violations"] == []
    assert "accept" in err


def test_witness_for_non_model_exits_4(compiled, capsys):
    tmp, inst = compiled
    assert run(["witness", str(inst), "--assign", "x=1,y=1", "-o", str(tmp / "w.json")]) == 4
    assert "gate-violation" in capsys.readouterr().err
    assert not (tmp / "w.json").exists()


def test_irrational_witness_exits_4(tmp_path, capsys):
    (tmp_path / "f.etr").write_text("x >= 0")
    assert run(["--quiet", "compile", str(tmp_path / "f.etr"), "-o", str(tmp_path / "i.json")]) == 0
    assert run(["witness", str(tmp_path / "i.json"), "--assign", "x=2", "-o", str(tmp_path / "w.json")]) == 4
    assert "irrational-witness" in capsys.readouterr().err


def test_tampered_witness_is_rejected(compiled, capsys):
    tmp, inst = compiled
    wit = tmp / "w.json"
    run(["--quiet", "witness", str(inst), "--assign", "x=2,y=3", "-o", str(wit)])
    doc = json.loads(wit.read_text())
    doc["U"][0][0] = "2/1"
    wit.write_text(json.dumps(doc))
    capsys.readouterr()
    assert run(["--quiet", "verify", str(inst), str(wit)]) == 1
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["accept"] is False and "affine:gauge" in verdict["violations"]


def test_usage_errors_exit_2(compiled, capsys):
    tmp, inst = compiled
    assert run(["frobnicate"]) == 2
    assert run(["witness", str(inst), "--assign", "x=", "-o", str(tmp / "w.json")]) == 2
    assert run(["emit-etr", str(inst), "--mode", "cubes", "-o", str(tmp / "e")]) == 2


def test_format_errors_exit_3(tmp_path, capsys):
    assert run(["stats", str(tmp_path / "missing.json")]) == 3
    (tmp_path / "bad.json").write_text("{}")
    assert run(["stats", str(tmp_path / "bad.json")]) == 3
    (tmp_path / "bad.etr").write_text("x + = 0")
    assert run(["compile", str(tmp_path / "bad.etr"), "-o", str(tmp_path / "o.json")]) == 3
    assert "bad.etr" in capsys.readouterr().err


def test_too_large_exits_3(compiled, capsys):
    tmp, inst = compiled
    assert run(["emit-etr", str(inst), "--mode", "minors", "--cap", "100", "-o", str(tmp / "e")]) == 3
    assert "too-large" in capsys.readouterr().err


def test_stats_on_gauge_only_instance(tmp_path, capsys):
    path = tmp_path / "g.json"
    path.write_bytes(serialize(emit_gauge(ArmInstance.empty()).validate()))
    assert run(["stats", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["q"] == 9


def test_output_is_byte_identical_across_runs(tmp_path, capsys):
    (tmp_path / "f.etr").write_text(PRODUCT_SUM)
    outs = []
    for k in range(2):
        path = tmp_path / f"i{k}.json"
        run(["--quiet", "compile", str(tmp_path / "f.etr"), "-o", str(path)])
        run(["stats", str(path)])
        outs.append((path.read_bytes(), capsys.readouterr().out))
    assert outs[0] == outs[1]


def test_quiet_suppresses_stderr(tmp_path, capsys):
    (tmp_path / "f.etr").write_text(PRODUCT_SUM)
    run(["--quiet", "compile", str(tmp_path / "f.etr"), "-o", str(tmp_path / "i.json")])
    assert capsys.readouterr().err == ""
    run(["compile", str(tmp_path / "f.etr"), "-o", str(tmp_path / "i.json"), "--dump-circuit", str(tmp_path / "c")])
    assert "30 constraints" in capsys.readouterr().err
    assert "outputs = [" in (tmp_path / "c").read_text()


def test_decode(compiled, capsys):
    tmp, inst = compiled
    wit = tmp / "w.json"
    run(["--quiet", "witness", str(inst), "--assign", "x=2,y=3", "-o", str(wit), "--include-x"])
    capsys.readouterr()
    assert run(["decode", str(inst), str(wit)]) == 0
    decoded = json.loads(capsys.readouterr().out)
    by_role = {d["role"]: d["value"] for d in decoded.values()}
    assert by_role["input:x"] == "2/1" and by_role["input:y"] == "3/1"


def test_emit_etr_modes(tmp_path, capsys):
    path = tmp_path / "g.json"
    path.write_bytes(serialize(emit_gauge(ArmInstance.empty()).validate()))
    assert run(["--quiet", "emit-etr", str(path), "-o", str(tmp_path / "f.etr")]) == 0
    assert (tmp_path / "f.etr").read_text().count(" = 0") == 9
    assert run(["--quiet", "emit-etr", str(path), "--mode", "minors", "-o", str(tmp_path / "m.etr")]) == 0
    assert "X_0_0" in (tmp_path / "m.etr").read_text()


def test_selftest(capsys):
    assert run(["selftest"]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("[")]
    assert len(lines) == 10 and all(l.startswith("[PASS]") for l in lines)
