"""
Test the ncalg command line: exit codes, formats and reproducible output
"""
import json

import pytest

from app.main import main
from app.services.verify_service import VerifyService

TWO_LOOPS = {"preprojective": {"vertices": ["v"], "edges": [{"tail": "v", "head": "v"}, {"tail": "v", "head": "v"}]}}
MONOMIAL = {"monomial": {"alphabet": [{"name": "x"}, {"name": "y"}], "relations": [["x", "x", "y", "y"]]}}
PARTIAL_A2 = {"partial": {"quiver": {"vertices": [0, 1], "edges": [{"tail": 0, "head": 1}]}, "J": [0]}}
AFFINE_D4 = {"vertices": ["c", "1", "2", "3", "4"], "edges": [{"tail": "c", "head": str(k)} for k in range(1, 5)]}


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data), encoding="utf-8")
    return str(path)


def test_hilbert_of_two_loop_preprojective(tmp_path, capsys):
    path = write(tmp_path, "loops.json", TWO_LOOPS)
    assert main(["hilbert", path, "--order", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["hA"]["entries"] == [[["1", "4", "15", "56"]]]
    assert report["hOA"]["coeffs"] == ["1", "4", "20", "80"]
    assert report["classification"]["kind"] == "Wild"
    assert set(report["hochschild"]) == {"hHH0", "hHH1", "hHH2"}


def test_hilbert_order_zero(tmp_path, capsys):
    path = write(tmp_path, "loops.json", TWO_LOOPS)
    assert main(["hilbert", "--datum", path, "--order", "0"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["hA"]["entries"] == [[["1"]]]
    assert report["zeta"]["coeffs"] == ["1"]


def test_hilbert_expected_rep_dimension(tmp_path, capsys):
    path = write(tmp_path, "loops.json", TWO_LOOPS)
    assert main(["hilbert", path, "--order", "2", "--dims", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["expected_rep_dimension"] == "13"


def test_hilbert_of_explicit_datum_carries_note(tmp_path, capsys):
    path = write(tmp_path, "free.json", {"dimsV": [[[0, 1]]]})
    assert main(["hilbert", path, "--order", "5", "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert "zeta = 1, 1, 2, 3, 5, 7" in out
    assert "note:" in out


def test_dynkin_quiver_gets_no_OPi(tmp_path, capsys):
    path = write(tmp_path, "a2.json", {"preprojective": {"vertices": [0, 1], "edges": [{"tail": 0, "head": 1}]}})
    assert main(["hilbert", path, "--order", "4"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert "hOA" not in report
    assert len(report["notes"]) == 2


def test_hilbert_of_monomial_presentation(tmp_path, capsys):
    path = write(tmp_path, "xxyy.json", MONOMIAL)
    assert main(["hilbert", path, "--order", "5"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["source"] == "monomial"
    assert report["hA"]["entries"] == [[["1", "2", "4", "8", "15", "28"]]]
    # strongly free, so lambda = 1 and the cyclic words give zeta
    assert report["hOA"] == report["zeta"]
    assert set(report["m"]) == {"0"}
    assert "hochschild" in report


def test_overlapping_monomial_relations_carry_note(tmp_path, capsys):
    path = write(tmp_path, "xyx.json", {"monomial": {"alphabet": [{"name": "x"}, {"name": "y"}], "relations": [["x", "y", "x"]]}})
    assert main(["hilbert", path, "--order", "4"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert "hochschild" not in report
    assert any("overlap" in note for note in report["notes"])


def test_monomial_relation_with_unknown_letter_exits_2(tmp_path):
    path = write(tmp_path, "bad.json", {"monomial": {"alphabet": [{"name": "x"}], "relations": [["x", "z"]]}})
    assert main(["hilbert", path]) == 2


def test_partial_preprojective_reports_OA_only(tmp_path, capsys):
    path = write(tmp_path, "partial.json", PARTIAL_A2)
    assert main(["hilbert", path, "--order", "4"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["source"] == "partial preprojective"
    assert "zeta" not in report
    assert report["hOA"]["coeffs"][0] == "1"
    assert any("no lambda factor" in note for note in report["notes"])


@pytest.mark.parametrize("content", ["{", json.dumps({"dimsV": [[[1, 1]]]}), json.dumps({})])
def test_malformed_input_exits_2(tmp_path, capsys, content):
    path = write(tmp_path, "bad.json", content)
    assert main(["hilbert", path]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path):
    assert main(["hilbert", str(tmp_path / "missing.json")]) == 2


def test_negative_order_exits_2(tmp_path):
    path = write(tmp_path, "loops.json", TWO_LOOPS)
    assert main(["hilbert", path, "--order", "-1"]) == 2


def test_repeat_runs_are_byte_identical(tmp_path, capsys):
    path = write(tmp_path, "loops.json", TWO_LOOPS)
    main(["hilbert", path, "--order", "6", "--format", "csv"])
    first = capsys.readouterr().out
    main(["hilbert", path, "--order", "6", "--format", "csv"])
    assert capsys.readouterr().out == first
    assert first.startswith("series,i,j,k,coeff\n")


def test_verify_suite(capsys):
    assert main(["verify", "--suite", "cq", "--order", "5"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is True
    assert report["order"] == 5


def test_verify_text_format(capsys):
    assert main(["verify", "--suite", "super", "--order", "8", "--format", "text"]) == 0
    assert capsys.readouterr().out.splitlines()[-1].endswith("checks passed")


def test_identity_on_affine_d4(tmp_path, capsys):
    path = write(tmp_path, "d4.json", AFFINE_D4)
    assert main(["identity", path, "--order", "12"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["equal"] is True
    assert report["extra"]["type"] == "~D4"
    assert report["extra"]["det_equal"] is True


def test_identity_refuses_wild_quiver(tmp_path):
    path = write(tmp_path, "loops.json", TWO_LOOPS["preprojective"])
    assert main(["identity", path]) == 2


def test_mc_below_stable_range_fails_the_band(tmp_path, capsys):
    # at d = 1 the integral is (1 - t)^-2, not zeta = 1, 2, 6, 14
    path = write(tmp_path, "free.json", {"dimsV": [[[0, 2]]]})
    assert main(["mc", path, "--dims", "1", "--order", "3", "--samples", "10"]) == 1
    report = json.loads(capsys.readouterr().out)
    assert [float(x) for x in report["mean"]] == pytest.approx([1, 2, 3, 4])
    assert report["target"] == ["1", "2", "6", "14"]
    assert report["passed"] is False


def test_mc_needs_dims(tmp_path):
    path = write(tmp_path, "free.json", {"dimsV": [[[0, 2]]]})
    assert main(["mc", path, "--order", "2", "--samples", "10"]) == 2


def test_mc_output_does_not_depend_on_threads(tmp_path, capsys):
    path = write(tmp_path, "loops.json", TWO_LOOPS)
    args = ["mc", path, "--dims", "2", "--order", "2", "--samples", "40", "--seed", "3"]
    main(args + ["--threads", "1"])
    first = capsys.readouterr().out
    main(args + ["--threads", "3"])
    assert capsys.readouterr().out == first


def test_threads_must_be_positive(tmp_path):
    path = write(tmp_path, "loops.json", TWO_LOOPS)
    assert main(["mc", path, "--dims", "2", "--threads", "0"]) == 2


def test_verify_suite_that_breaks_exits_3(monkeypatch, capsys):
    def broken(self, suite, order=None):
        raise ZeroDivisionError("division by zero")

    monkeypatch.setattr(VerifyService, "run", broken)
    assert main(["verify", "--suite", "cq"]) == 3
    assert "internal error: ZeroDivisionError" in capsys.readouterr().err
