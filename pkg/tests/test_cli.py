import io
import json

import pytest

from floerkit.cli import run
from floerkit.complex import box, direct_sum, mirror, serialize, trefoil, unknot


@pytest.fixture
def t23_file(write_complex, golden):
    return write_complex(golden("t23.cfk"), "t23.cfk")


@pytest.fixture
def fig8_file(write_complex, golden):
    return write_complex(golden("figure8.cfk"), "figure8.cfk")


def test_make_trefoil_matches_golden(capsys, golden):
    assert run(["make", "trefoil"]) == 0
    assert capsys.readouterr().out == golden("t23.cfk")


def test_make_box_accepts_negative_grading(capsys):
    assert run(["make", "box", "1", "-1"]) == 0
    assert capsys.readouterr().out == serialize(box(1, -1))


def test_make_rejects_bad_steps(capsys):
    assert run(["make", "staircase", "1,0"]) == 1
    assert "error:" in capsys.readouterr().err


def test_validate(capsys, t23_file, write_complex):
    assert run(["validate", t23_file]) == 0
    assert capsys.readouterr().out.strip() == "valid"
    bad = write_complex("gen a A=0 M=0\ngen b A=-1 M=0\nd a = b\n", "bad.cfk")
    assert run(["validate", bad]) == 1


def test_invariants(capsys, t23_file):
    assert run(["invariants", t23_file]) == 0
    out = capsys.readouterr().out
    assert out.startswith("genus: 1\ntau: 1\n")
    assert "hook profile: {0:1, ±1:1}" in out


def test_detect_as_json(capsys, fig8_file):
    assert run(["--json", "detect", fig8_file]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] == "AlmostLSpace"
    assert data["hook_profile"] == {"-1": 1, "0": 3, "1": 1}


def test_region_and_triangle(capsys, t23_file):
    assert run(["region", t23_file, "--region", "i=0"]) == 0
    assert capsys.readouterr().out.strip() == "F_0"
    assert run(["triangle", t23_file, "--sub", "i=0,j<=0", "--total", "i=0"]) == 0
    assert capsys.readouterr().out.strip().endswith("exact")
    assert run(["triangle", t23_file, "--m", "1"]) == 0


def test_triangle_needs_regions(capsys, t23_file):
    assert run(["triangle", t23_file]) == 1
    assert "error:" in capsys.readouterr().err


def test_surgery(capsys, t23_file):
    assert run(["surgery", t23_file, "--pq", "5"]) == 0
    assert capsys.readouterr().out.strip() == "5"
    assert run(["surgery", t23_file, "--pq", "4/2"]) == 1


def test_surgery_on_almost_lspace_knot(capsys, fig8_file):
    assert run(["surgery", fig8_file, "--pq", "3/2"]) == 0
    assert capsys.readouterr().out.strip() == "7"


def test_stability(capsys, fig8_file):
    assert run(["stability", fig8_file, "--samples", "1/1", "5/2"]) == 0
    assert capsys.readouterr().out.strip().endswith("ok")


def test_classify_writes_witness(capsys, fig8_file, tmp_path):
    witness = tmp_path / "witness.cfk"
    log = tmp_path / "moves.txt"
    assert run(["classify", fig8_file, "--witness", str(witness), "--log", str(log)]) == 0
    assert capsys.readouterr().out.strip() == "StaircasePlusBox"
    assert witness.read_text() == serialize(direct_sum(unknot(), box(1, 1)))
    assert log.exists()


def test_equiv(t23_file, fig8_file):
    assert run(["equiv", t23_file, t23_file]) == 0
    assert run(["equiv", t23_file, fig8_file]) == 1


def test_mirror_reads_stdin(capsys, monkeypatch, golden):
    monkeypatch.setattr("sys.stdin", io.StringIO(golden("t23.cfk")))
    assert run(["mirror", "-"]) == 0
    assert capsys.readouterr().out == serialize(mirror(trefoil()))


def test_ascii_grid(capsys):
    assert run(["--ascii", "make", "figure8"]) == 0
    assert "x2 -> U^1 x1" in capsys.readouterr().out


def test_enumerate_genus_zero(capsys, tmp_path):
    assert run(["enumerate", "--genus", "0", "--out", str(tmp_path / "out")]) == 0
    assert capsys.readouterr().out.strip() == "0 candidates"


def test_usage_errors_exit_two(capsys):
    assert run([]) == 2
    assert run(["bogus"]) == 2
    assert run(["surgery", "x.cfk"]) == 2


def test_missing_file_and_parse_errors(capsys, write_complex):
    assert run(["validate", "/nonexistent/knot.cfk"]) == 1
    broken = write_complex("gen a A=0\n", "broken.cfk")
    assert run(["validate", broken]) == 1
    assert "line 1" in capsys.readouterr().err
