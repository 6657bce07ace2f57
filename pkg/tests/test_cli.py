import json
import math
from pathlib import Path

import pytest

from specreg.cli import main
from specreg.serialize import canonical_dumps, expansion_from_json, expansion_to_json

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "name,expected",
    [
        ("regular_robin.json", {"class": "BirkhoffRegular", "order": 0}),
        ("almost_order1.json", {"class": "AlmostRegular", "order": 1}),
        ("almost_order2.json", {"class": "AlmostRegular", "order": 2}),
        ("almost_order3.json", {"class": "AlmostRegular", "order": 3}),
        ("not_normal.json", {"class": "NotNormal", "order": None}),
        ("symmetric_undetermined.json", {"class": "UndeterminedBeyondCap", "order": None}),
        ("trig_float.json", {"class": "AlmostRegular", "order": 3}),
    ],
)
def test_classify_verdicts(capsys, name, expected):
    code, out, _ = run(capsys, "classify", PROBLEMS / name)
    assert code == 0
    doc = json.loads(out)
    assert {k: doc[k] for k in expected} == expected
    assert out == canonical_dumps(doc)


@pytest.mark.parametrize("route", ["theorem", "delta", "both"])
def test_routes_and_evidence(capsys, route):
    code, out, _ = run(capsys, "classify", PROBLEMS / "almost_order3.json", "--route", route, "--evidence")
    doc = json.loads(out)
    assert code == 0 and doc["order"] == 3
    assert doc["evidence"] and all({"label", "satisfied", "value"} == set(e) for e in doc["evidence"])


def test_backends_agree(capsys):
    for name in ("almost_order1.json", "almost_order3.json", "symmetric_undetermined.json", "not_normal.json"):
        outs = [run(capsys, "classify", PROBLEMS / name, "--backend", b)[1] for b in ("rational", "float")]
        assert outs[0] == outs[1]


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"boundary": {"a11": [1, 0],\n  "q": }')
    code, _, err = run(capsys, "classify", bad)
    assert code == 2
    assert "line 2" in err and "column" in err


@pytest.mark.parametrize(
    "doc",
    [
        {"q": {"kind": "poly", "coeffs": []}},
        {"boundary": {"zz": [1, 0]}, "q": {"kind": "poly", "coeffs": []}},
        {"boundary": {"a11": [0.5, 0]}, "q": {"kind": "poly", "coeffs": []}},
        {"boundary": {"a11": [1, 0], "b20": [1, 0]}, "q": {"kind": "spline"}},
        {"boundary": {}, "q": {"kind": "poly", "coeffs": [[1, 0]]}},
    ],
)
def test_invalid_problems_exit_2(capsys, tmp_path, doc):
    path = tmp_path / "p.json"
    path.write_text(json.dumps(doc))
    assert run(capsys, "classify", path)[0] == 2


def test_expand_round_trip_is_byte_identical(capsys, tmp_path):
    for name in ("almost_order2.json", "trig_float.json"):
        out = tmp_path / "e.json"
        assert run(capsys, "expand", PROBLEMS / name, "--order", 3, "-o", out)[0] == 0
        text = out.read_text()
        g, dt = expansion_from_json(json.loads(text))
        assert canonical_dumps(expansion_to_json(g, dt)) == text


def test_expand_linear_potential(capsys):
    code, out, _ = run(capsys, "expand", PROBLEMS / "almost_order2.json", "--order", 3)
    doc = json.loads(out)
    assert code == 0
    assert doc["g"]["g_10^(1)"]["coeffs"] == [["0", "0"], ["0", "0"], ["1/4", "0"]]
    assert doc["delta"]["-1"][2] == ["1/2", "0"]
    assert doc["delta"]["-1"][3] == ["5/8", "0"]


def test_expand_zero_potential(capsys):
    doc = json.loads(run(capsys, "expand", PROBLEMS / "dirichlet_zero.json", "--order", 4)[1])
    for key, f in doc["g"].items():
        if not key.endswith("^(0)"):
            assert f["coeffs"] == []
    assert "delta" not in doc  # no derivative terms: regular without a reduced table


def test_expand_order_above_cap(capsys):
    assert run(capsys, "expand", PROBLEMS / "almost_order2.json", "--order", 99)[0] == 2


def test_validate_slopes(capsys, tmp_path):
    csv_path = tmp_path / "r.csv"
    code, out, _ = run(capsys, "validate", PROBLEMS / "dirichlet_quadratic.json", "--order", 1, "--points", 4,
                       "-o", csv_path)
    assert code == 0
    slopes = [float(line.rsplit(":", 1)[1]) for line in out.splitlines() if "i=" in line]
    assert len(slopes) == 8 and all(abs(s + 2) < 0.5 for s in slopes)
    header = csv_path.read_text().splitlines()[0]
    assert header == "re_lambda,im_lambda,i,nu,max_eta,bound_pred"


def test_validate_zero_potential(capsys):
    code, out, err = run(capsys, "validate", PROBLEMS / "dirichlet_zero.json", "--points", 4)
    assert code == 0
    assert out.startswith("re_lambda")
    assert err.count("below solver noise") == 8


def test_validate_requires_four_points(capsys):
    code, _, err = run(capsys, "validate", PROBLEMS / "dirichlet_zero.json", "--points", 2)
    assert code == 2 and "at least 4" in err


def test_spectrum_dirichlet(capsys, tmp_path):
    out = tmp_path / "s.json"
    assert run(capsys, "spectrum", PROBLEMS / "dirichlet_zero.json", "--re=-1..1", "--im", "0..10", "-o", out)[0] == 0
    roots = json.loads(out.read_text())
    assert len(roots) == 3
    for k, (re, im) in enumerate(roots, start=1):
        assert abs(re) < 1e-8 and abs(im - k * math.pi) < 1e-8


def test_spectrum_constant_shift(capsys):
    roots = json.loads(run(capsys, "spectrum", PROBLEMS / "dirichlet_const.json", "--re=-1..1", "--im", "0..10")[1])
    assert [round(im**2, 6) for _, im in roots] == [round((k * math.pi) ** 2 - 3, 6) for k in (1, 2, 3)]


def test_spectrum_empty_window(capsys):
    code, out, _ = run(capsys, "spectrum", PROBLEMS / "dirichlet_zero.json", "--re", "0..0", "--im", "0..10")
    assert code == 0 and json.loads(out) == []


def test_spectrum_bad_range(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", str(PROBLEMS / "dirichlet_zero.json"), "--re", "nope", "--im", "0..1"])
    assert exc.value.code == 2


def test_gen_is_reproducible(capsys, tmp_path):
    a = run(capsys, "gen", "--seed", 5)[1]
    b = run(capsys, "gen", "--seed", 5)[1]
    assert a == b
    path = tmp_path / "g.json"
    path.write_text(a)
    assert run(capsys, "classify", path)[0] == 0
