import json
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from kreinrange.cli import (
    EXIT_ERROR,
    EXIT_NOT_CERTIFIED,
    EXIT_OK,
    InputError,
    dump_json,
    main,
    parse_complex,
    parse_document,
    parse_metric,
)
from kreinrange.tridiag import TridiagonalSpec

INPUTS = Path(__file__).resolve().parent.parent / "inputs"
FAST = ["--grid", "180", "--samples", "2000"]


@pytest.mark.parametrize("value, want", [
    (3, 3), (2.5, 2.5), ([1, -2], 1 - 2j), ("3-2i", 3 - 2j), ("i", 1j), ("-i", -1j),
    ("1 + 2j", 1 + 2j), ("4", 4), ("-2.5e-1i", -0.25j),
])
def test_parse_complex(value, want):
    assert parse_complex(value, "x") == want


@pytest.mark.parametrize("value", [True, [1], [1, "2"], "abc", None, "nan", {"re": 1}])
def test_parse_complex_rejects(value):
    with pytest.raises(InputError):
        parse_complex(value, "x")


def test_parse_metric():
    assert parse_metric([1, -1, 1]).signs == (1, -1, 1)
    with pytest.raises(InputError, match="±1"):
        parse_metric([1, 2])
    with pytest.raises(InputError):
        parse_metric([])


def test_parse_documents():
    spec = parse_document({"kind": "tridiagonal", "order": 4, "a": 5, "b": [1, 2, 7]})
    assert spec == TridiagonalSpec.centrosymmetric(5, (1, 2, 7))
    A, J = parse_document({"kind": "dense", "J": [1, -1], "A": [[1, "i"], [0, 2]]})
    assert np.array_equal(A, np.array([[1, 1j], [0, 2]])) and J.signs == (1, -1)
    bad = [
        {"kind": "dense", "J": [1, -1], "A": [[1, 2], [3]]},
        {"kind": "dense", "J": [1, -1, 1], "A": [[1, 2], [3, 4]]},
        {"kind": "dense", "A": [[1]]},
        {"kind": "tridiagonal", "order": 3, "a": 1, "b": [1]},
        {"kind": "tridiagonal", "order": 3, "a": 1, "b": [1, 2], "J": [1, 1, -1]},
        {"kind": "banded"},
        [],
    ]
    for doc in bad:
        with pytest.raises(InputError):
            parse_document(doc)


@pytest.mark.parametrize("name, code", [
    ("order3_disc", EXIT_OK),
    ("order3_disc_shifted", EXIT_OK),
    ("order5_disc", EXIT_OK),
    ("order4_nested", EXIT_OK),
    ("order4_whole_plane", EXIT_NOT_CERTIFIED),
    ("order6_cubic_factors", EXIT_NOT_CERTIFIED),
    ("order6_b3zero", EXIT_OK),
])
def test_certify_exit_codes(name, code, tmp_path):
    out = tmp_path / "r.json"
    assert main(["certify", "--input", str(INPUTS / f"{name}.json"), "--out", str(out)] + FAST) == code
    report = json.loads(out.read_text())
    assert report["verdict"] is (code == EXIT_OK)


def test_whole_plane_report_keeps_certificate_verdict(tmp_path):
    out = tmp_path / "r.json"
    main(["certify", "--input", str(INPUTS / "order4_whole_plane.json"), "--out", str(out)] + FAST)
    report = json.loads(out.read_text())
    assert report["certificate_verdict"] is True
    assert report["classification"]["kind"] == "WholePlane"


def test_input_errors_exit_with_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "dense",\n "J": [1, -1],\n "A": [[1, 2] [3, 4]]}')
    assert main(["classify", "--input", str(bad)]) == EXIT_ERROR
    assert "line 3" in capsys.readouterr().err
    metric = tmp_path / "metric.json"
    metric.write_text(json.dumps({"kind": "dense", "J": [1, 3], "A": [[1, 0], [0, 1]]}))
    assert main(["classify", "--input", str(metric)]) == EXIT_ERROR
    seven = tmp_path / "seven.json"
    seven.write_text(json.dumps({"kind": "tridiagonal", "order": 7, "a": 1, "b": [1] * 6}))
    assert main(["certify", "--input", str(seven)]) == EXIT_ERROR
    assert "unsupported order" in capsys.readouterr().err
    assert main(["classify", "--input", str(tmp_path / "missing.json")]) == EXIT_ERROR
    assert main(["classify", "--input", str(INPUTS / "order3_disc.json"), "--grid", "4"]) == EXIT_ERROR


def test_outputs_are_byte_deterministic(tmp_path):
    for cmd in ("certify", "classify", "boundary", "sample"):
        outs = []
        for k in range(2):
            path = tmp_path / f"{cmd}{k}.out"
            main([cmd, "--input", str(INPUTS / "order3_disc.json"), "--out", str(path)] + FAST)
            outs.append(path.read_bytes())
        assert outs[0] == outs[1], cmd


def test_classify_json_round_trip(tmp_path):
    path = tmp_path / "c.json"
    assert main(["classify", "--input", str(INPUTS / "order4_nested.json"), "--out", str(path)] + FAST) == EXIT_OK
    text = path.read_text()
    doc = json.loads(text)
    assert doc["classification"]["kind"] == "BihyperbolicNested"
    assert dump_json(doc) == text


@pytest.mark.parametrize("cmd", ["classify", "boundary", "sample"])
def test_svg_is_well_formed(cmd, tmp_path):
    svg = tmp_path / "f.svg"
    args = [cmd, "--input", str(INPUTS / "order3_disc.json"), "--out", str(tmp_path / "o"), "--svg", str(svg)]
    assert main(args + FAST) == EXIT_OK
    root = ET.fromstring(svg.read_bytes())
    assert root.tag == "{http://www.w3.org/2000/svg}svg" and root.get("version") == "1.1"
    assert root.findall(".//{http://www.w3.org/2000/svg}circle")


def test_boundary_csv(tmp_path):
    path = tmp_path / "b.csv"
    main(["boundary", "--input", str(INPUTS / "order3_disc.json"), "--out", str(path), "--grid", "16"])
    rows = path.read_text().splitlines()
    assert rows[0] == "theta,re,im,sign"
    assert all(len(r.split(",")) == 4 for r in rows[1:])


def test_degenerate_inputs_classify(tmp_path, capsys):
    for name, kind in (("nilpotent", "WholePlane"), ("identity", "Point")):
        assert main(["classify", "--input", str(INPUTS / f"{name}.json")] + FAST) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["classification"]["kind"] == kind
