import json

import pytest

from ppoly.cli import main

TRAP = {"dim": 2, "params": ["a", "b"], "reference": {"a": "1", "b": "1"},
        "ineqs": [{"normal": ["-1", "0"], "offset": {"const": "0"}},
                  {"normal": ["0", "-1"], "offset": {"const": "0"}},
                  {"normal": ["0", "1"], "offset": {"b": "1"}},
                  {"normal": ["1", "1"], "offset": {"a": "1", "b": "1"}}]}
CUBE = {"points": [[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)]}


@pytest.fixture
def files(tmp_path):
    t = tmp_path / "trap.json"
    t.write_text(json.dumps(TRAP))
    c = tmp_path / "cube.json"
    c.write_text(json.dumps(CUBE))
    return tmp_path, t, c


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_volume(files, capsys):
    _, t, c = files
    assert run(capsys, "volume", "-i", str(c)) == (0, "1\n")
    assert run(capsys, "volume", "-i", str(t)) == (0, "a*b + 1/2*b^2\n")


def test_ring(files, capsys):
    _, t, _ = files
    code, out = run(capsys, "ring", "-i", str(t))
    rep = json.loads(out)
    assert code == 0
    assert rep["hilbert"] == [1, 2, 1]
    assert rep["annihilator_generators"]["2"] == ["∂a^2", "-∂a*∂b + ∂b^2"]


def test_build_roundtrip_and_determinism(files, capsys):
    tmp, t, c = files
    code, out1 = run(capsys, "build", "-i", str(c))
    assert code == 0
    again = tmp / "again.json"
    again.write_text(out1)
    code, out2 = run(capsys, "build", "-i", str(again))
    assert out1 == out2
    code, ring_out = run(capsys, "ring", "-i", str(t))
    (tmp / "ring.json").write_text(ring_out)
    assert run(capsys, "build", "-i", str(tmp / "ring.json"))[0] == 0


def test_input_errors(files, capsys):
    tmp, _, _ = files
    assert main(["volume", "-i", str(tmp / "missing.json")]) == 2
    bad = tmp / "bad.json"
    bad.write_text("{not json")
    assert main(["build", "-i", str(bad)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["volume", "--bogus"])
    assert exc.value.code == 2
    assert main(["fflv", "--lambdas", "0,2,1"]) == 2


def test_pushpull_verify(files, capsys):
    tmp, t, _ = files
    spec = {"base": TRAP, "shift": {"b": "1"}, "faces": [[1, 3]], "d_f_hint": "∂a*∂b"}
    path = tmp / "spec.json"
    path.write_text(json.dumps(spec))
    code, out = run(capsys, "pushpull-verify", "-i", str(path))
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and rep["ode"]
    spec["faces"] = [[1, 2]]
    path.write_text(json.dumps(spec))
    assert main(["pushpull-verify", "-i", str(path)]) == 2


def test_gk(capsys):
    code, out = run(capsys, "gk", "--rank", "2", "--word", "1,2", "--samples", "4", "--seed", "1")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and len(rep["results"]) == 4
    code, out = run(capsys, "gk", "--rank", "2", "--word", "1,2,1", "--lam", "2,1,0")
    assert json.loads(out)["results"][0]["lemma_precondition"] is False
    assert main(["gk", "--rank", "2", "--word", "1,5"]) == 2


def test_fflv(capsys):
    code, out = run(capsys, "fflv", "--lambdas", "0,1,2")
    rep = json.loads(out)
    assert rep["f_vector"] == [7, 11, 6, 1]
    assert rep["volume"] == "1"


def test_figures(tmp_path, capsys):
    code, out = run(capsys, "figures", "-o", str(tmp_path))
    assert code == 0
    names = json.loads(out)["written"]
    assert "triangle_Delta.off" in names and "trapezoid_Q.svg" in names
    off = (tmp_path / "triangle_Delta.off").read_text().splitlines()
    assert off[0] == "OFF" and off[1] == "7 6 0"
    assert (tmp_path / "trapezoid_P.svg").read_text().startswith("<svg")
