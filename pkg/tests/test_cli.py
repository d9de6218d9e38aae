import json

import numpy as np
import pytest

from conequantile import ConeCdf, ConvexCone, EmpiricalSample, QuantileFn, io
from conequantile.cli import run
from conequantile.errors import ConfigurationError


@pytest.fixture
def files(tmp_path):
    (tmp_path / "s4.csv").write_text("x,y\n0,0\n1,0\n0,1\n1,1\n")
    (tmp_path / "k.csv").write_text("0,0\n0.5,0.2\n")
    (tmp_path / "g.json").write_text('{"G": [[0.5, 0.5]]}')
    (tmp_path / "g0.json").write_text('{"G": [[0, 0]]}')
    (tmp_path / "gauss.json").write_text('{"mu": [0, 0], "sigma": [[1, 0], [0, 1]]}')
    (tmp_path / "whole.json").write_text('{"dim": 2, "generators": [[1,0],[-1,0],[0,1],[0,-1]]}')
    (tmp_path / "bad.csv").write_text("x,y\n0,0\n1\n")
    return tmp_path


def out_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_quantile_json_and_svg(files, capsys):
    svg = files / "out.svg"
    rc = run(["quantile", "--data", str(files / "s4.csv"), "--cone", "orthant", "--p", "0.25", "--p", "0.5", "--svg", str(svg)])
    assert rc == 0
    rec = out_json(capsys)
    assert rec["config"]["levels"] == [0.25, 0.5]
    assert [r["p"] for r in rec["regions"]] == [0.25, 0.5]
    assert rec["outer_approximation"] is False
    text = svg.read_text()
    assert text.count("<path") == 2 and text.count("<circle") == 4
    # each polygon vertex is a member of the region at its level
    q = QuantileFn(ConeCdf.build(EmpiricalSample([[0, 0], [1, 0], [0, 1], [1, 1]]), ConvexCone.orthant(2)))
    for r in rec["regions"]:
        assert all(q.member(r["p"], v) for v in r["polygon"])


def test_region_json_round_trip(files, capsys):
    path = files / "q.json"
    assert run(["quantile", "--data", str(files / "s4.csv"), "--p", "0.5", "--p", "1", "--json", str(path)]) == 0
    rec = json.loads(path.read_text())
    s4 = EmpiricalSample([[0, 0], [1, 0], [0, 1], [1, 1]])
    q = QuantileFn(ConeCdf.build(s4, ConvexCone.orthant(2)))
    Z = np.random.default_rng(0).uniform(-1, 2, size=(400, 2))
    for r in rec["regions"]:
        region = io.region_from_json(r)
        assert np.array_equal(region.contains_many(Z), q.lower_quantile(r["p"]).contains_many(Z))


def test_outputs_are_byte_identical(files, capsys):
    args = ["simulate", "--data", str(files / "s4.csv"), "--K", str(files / "k.csv"), "--n", "2000", "--seed", "7"]
    run(args)
    a = capsys.readouterr().out
    run(args)
    assert capsys.readouterr().out == a


def test_simulate(files, capsys):
    trace = files / "trace.csv"
    rc = run(["simulate", "--data", str(files / "s4.csv"), "--cone", "orthant", "--K", str(files / "k.csv"),
              "--n", "20000", "--seed", "7", "--trace", str(trace)])
    assert rc == 0
    rec = out_json(capsys)
    assert rec["exact"] == 0.25 and rec["within_3_std_error"] and rec["seed"] == 7
    assert len(trace.read_text().splitlines()) == 20001


def test_cdf_depth(files, capsys):
    assert run(["cdf", "--data", str(files / "s4.csv"), "--z", "0.5,0.5", "--w", "1,0"]) == 0
    rec = out_json(capsys)
    assert rec["results"][0]["F_C"] == 0.5 and rec["results"][0]["F_w"] == 0.5
    assert run(["depth", "--data", str(files / "s4.csv"), "--z", "10,10", "--points", str(files / "k.csv")]) == 0
    rec = out_json(capsys)
    assert [r["depth"] for r in rec["results"]] == [0.0, 0.25, 0.25]
    assert run(["cdf", "--gaussian", str(files / "gauss.json"), "--z", "0,0"]) == 0
    assert out_json(capsys)["results"][0]["F_C"] == pytest.approx(0.5)


def test_closure_and_rank(files, capsys):
    assert run(["closure", "--data", str(files / "s4.csv"), "--G", str(files / "g.json")]) == 0
    rec = out_json(capsys)
    assert rec["value"] == 0.5 and rec["is_psi_fixed"] is False
    assert rec["psi_closure"]["p"] == 0.5
    assert run(["rank", "--data", str(files / "s4.csv"), "--D1", str(files / "g0.json"), "--D2", str(files / "g.json")]) == 0
    rec = out_json(capsys)
    assert rec["psi"] == "less-or-equal" and rec["F_inf"] == [0.25, 0.5]


def test_selftest(capsys):
    assert run(["selftest"]) == 0
    assert out_json(capsys)["passed"] is True


@pytest.mark.parametrize(
    "argv",
    [
        ["cdf", "--data", "{d}/missing.csv", "--z", "0,0"],
        ["cdf", "--data", "{d}/bad.csv", "--z", "0,0"],
        ["cdf", "--data", "{d}/s4.csv", "--z", "0,0,0"],
        ["cdf", "--data", "{d}/s4.csv", "--cone", "halfspace:1", "--z", "0,0"],
        ["quantile", "--data", "{d}/s4.csv", "--p", "1.5"],
        ["simulate", "--data", "{d}/s4.csv", "--K", "{d}/k.csv", "--n", "10"],
        ["nonsense"],
        ["cdf", "--data", "{d}/s4.csv", "--gaussian", "{d}/gauss.json", "--z", "0,0"],
    ],
)
def test_malformed_input_exit_2(files, argv, capsys):
    assert run([a.format(d=files) for a in argv]) == 2
    assert "error" in capsys.readouterr().err


def test_degenerate_cone_exit_3(files, capsys):
    assert run(["cdf", "--data", str(files / "s4.csv"), "--cone", str(files / "whole.json"), "--z", "0,0"]) == 3


def test_unsupported_dimension_exit_3(files, tmp_path, capsys):
    (tmp_path / "d4.csv").write_text("1,2,3,4\n0,1,0,1\n")
    assert run(["cdf", "--data", str(tmp_path / "d4.csv"), "--z", "0,0,0,0"]) == 3


def test_csv_weights_and_header(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text("a,weight,b\n0,1,0\n1,3,1\n")
    pts, w = io.read_points_csv(p)
    assert pts.tolist() == [[0.0, 0.0], [1.0, 1.0]] and w.tolist() == [0.25, 0.75]
    p.write_text("0,0\n1,1\n")
    pts, w = io.read_points_csv(p)
    assert w is None and pts.shape == (2, 2)
    p.write_text("")
    with pytest.raises(ConfigurationError):
        io.read_points_csv(p)


def test_json_extended_reals():
    text = io.dumps({"a": float("inf"), "b": [-float("inf"), 0.1]})
    assert json.loads(text) == {"a": "inf", "b": ["-inf", 0.1]}
