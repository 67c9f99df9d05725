import json
import subprocess
import sys
from pathlib import Path

import pytest

from symgram.certify import SosCertificate, verify
from symgram.cli import EXIT_INDETERMINATE, EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, main
from symgram.families import quadratic_analysis_from_dict, quartic_analysis_from_dict
from symgram.hposet import EdgeVerdict
from symgram.polycore import parse_poly
from symgram.survey import SurveyReport

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_multiplicity_table(capsys):
    code, out, _ = run(capsys, "multiplicity", "--n", "3", "--d", "2")
    assert code == EXIT_OK
    assert out.splitlines()[1:] == ["3\t2", "2,1\t2", "1,1,1\t0"]


def test_multiplicity_json(capsys):
    code, out, _ = run(capsys, "multiplicity", "--n", "3", "--d", "2", "--json")
    rows = json.loads(out)["rows"]
    assert [(r["partition"], r["multiplicity"]) for r in rows] == [([3], 2), ([2, 1], 2), ([1, 1, 1], 0)]


def test_basis_json(capsys):
    code, out, _ = run(capsys, "basis", "--n", "3", "--d", "2", "--json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert [(e["m"], e["n"]) for e in data["layout"]] == [(2, 1), (2, 2)]
    assert data["block_error"] <= 1e-9


def test_certify_and_verify(capsys, tmp_path):
    cert_path = tmp_path / "cert.json"
    code, _, err = run(capsys, "certify", "--poly", str(DATA / "h21-h111.txt"), "--group", "s3",
                       "--objective", "min-rank", "--out", str(cert_path))
    assert code == EXIT_OK
    assert "total rank 4" in err
    cert = SosCertificate.from_json(cert_path.read_text())
    f = parse_poly((DATA / "h21-h111.txt").read_text().splitlines()[1], 3)
    assert verify(f, cert).ok()
    code, out, _ = run(capsys, "verify", "--poly", str(DATA / "h21-h111.txt"), "--cert", str(cert_path), "--json")
    assert code == EXIT_OK
    assert json.loads(out)["ok"] is True


def test_certify_stdout_is_certificate(capsys):
    code, out, _ = run(capsys, "certify", "--poly", str(DATA / "h21-h111.txt"), "--group", "s3")
    assert code == EXIT_OK
    assert json.loads(out)["schema"] == 1


def test_certify_infeasible(capsys):
    code, out, _ = run(capsys, "certify", "--poly", str(DATA / "quartic-not-sos.txt"))
    assert code == EXIT_INFEASIBLE
    assert json.loads(out)["status"] == "Infeasible"


def test_certify_icosahedral(capsys):
    code, _, _ = run(capsys, "certify", "--poly", str(DATA / "icosahedral-quartic.txt"), "--group", "ih")
    assert code == EXIT_OK


def test_verify_detects_wrong_polynomial(capsys, tmp_path):
    cert_path = tmp_path / "cert.json"
    run(capsys, "certify", "--poly", str(DATA / "h21-h111.txt"), "--out", str(cert_path))
    other = tmp_path / "other.txt"
    other.write_text("x1^6 + x2^6 + x3^6\n")
    code, out, _ = run(capsys, "verify", "--poly", str(other), "--cert", str(cert_path))
    assert code == EXIT_INFEASIBLE
    assert out.startswith("INVALID")


def test_quartic_not_sos(capsys):
    code, out, _ = run(capsys, "quartic", "--coeffs", "1,2,1,0")
    assert code == EXIT_INFEASIBLE
    assert out.count(": pass") == 3
    assert "witness f(1, -2, 1) = -9" in out


def test_quartic_json_round_trip(capsys):
    code, out, _ = run(capsys, "quartic", "--coeffs", "1,0,1,0", "--json")
    assert code == EXIT_OK
    result = quartic_analysis_from_dict(json.loads(out))
    assert len(result.psd_vertices) == 2


def test_quadratic(capsys):
    assert run(capsys, "quadratic", "--a", "1", "--b", "1", "--n", "5")[0] == EXIT_OK
    assert run(capsys, "quadratic", "--a", "1", "--b", "2", "--n", "3")[0] == EXIT_INFEASIBLE
    code, out, _ = run(capsys, "quadratic", "--a", "1", "--b=-1/4", "--n", "5", "--json")
    assert code == EXIT_OK
    assert quadratic_analysis_from_dict(json.loads(out)).rank == 4


def test_sextic(capsys):
    code, out, _ = run(capsys, "sextic", "--coeffs", "1/54,0,0,0,0,0,-1/18", "--json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["obstructions"] == {"case_a": "-1/27", "case_b": "0"}


def test_hpair(capsys):
    code, out, _ = run(capsys, "hpair", "--lambda", "5,2,1", "--mu", "4,4", "--json")
    assert code == EXIT_OK
    verdict = EdgeVerdict.from_dict(json.loads(out))
    assert verdict.status.value == "Certified" and verdict.color == "blue"
    assert run(capsys, "hpair", "--lambda", "3", "--mu", "1,1,1")[0] == EXIT_INFEASIBLE


def test_hposet_outputs(capsys, tmp_path):
    dot, js = tmp_path / "p.dot", tmp_path / "p.json"
    code, _, _ = run(capsys, "hposet", "--weight", "3", "--dot", str(dot), "--json", str(js))
    assert code == EXIT_OK
    assert '"2,1" -> "3" [color=black];' in dot.read_text()
    assert json.loads(js.read_text())["hasse"] == [[[1, 1, 1], [2, 1]], [[2, 1], [3]]]


def test_survey_outputs(capsys, tmp_path):
    csv_path, js = tmp_path / "s.csv", tmp_path / "s.json"
    code, _, _ = run(capsys, "survey", "--poly", str(DATA / "quartic-sos.txt"), "--samples", "5",
                     "--csv", str(csv_path), "--json", str(js))
    assert code == EXIT_OK
    assert csv_path.read_text().startswith("rank,count\n")
    assert SurveyReport.from_dict(json.loads(js.read_text())).samples == 5
    assert run(capsys, "survey", "--poly", str(DATA / "quartic-not-sos.txt"), "--samples", "2")[0] == EXIT_INFEASIBLE


def test_plot_flags(capsys, tmp_path):
    pytest.importorskip("matplotlib")
    hist, poset = tmp_path / "hist.png", tmp_path / "poset.png"
    run(capsys, "survey", "--poly", str(DATA / "quartic-sos.txt"), "--samples", "3", "--plot", str(hist))
    run(capsys, "hposet", "--weight", "3", "--plot", str(poset))
    for path in (hist, poset):
        assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


@pytest.mark.parametrize("argv", [
    [],
    ["nonsense"],
    ["multiplicity", "--n", "3"],
    ["quartic", "--coeffs", "1,2,3"],
    ["quadratic", "--a", "1", "--b", "x", "--n", "3"],
    ["quadratic", "--a", "1", "--b", "1", "--n", "1"],
    ["hpair", "--lambda", "2,1", "--mu", "2,2"],
    ["certify", "--poly", "/nonexistent/file.txt"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        sys.exit(main(argv))
    assert info.value.code == EXIT_USAGE
    assert capsys.readouterr().err


def test_indeterminate_exit_code_is_distinct():
    assert len({EXIT_OK, EXIT_INFEASIBLE, EXIT_INDETERMINATE, EXIT_USAGE}) == 4


@pytest.mark.parametrize("argv", [
    ["quartic", "--coeffs", "1,0,1,0", "--json"],
    ["survey", "--poly", str(DATA / "quartic-sos.txt"), "--samples", "4", "--seed", "3"],
    ["certify", "--poly", str(DATA / "binary-octic.txt")],
])
def test_byte_identical_output(argv):
    runs = [subprocess.run([sys.executable, "-m", "symgram", *argv], capture_output=True) for _ in range(2)]
    assert runs[0].returncode == runs[1].returncode == EXIT_OK
    assert runs[0].stdout == runs[1].stdout
    assert runs[0].stdout
