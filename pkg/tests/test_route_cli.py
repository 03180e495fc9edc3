import csv
import io
import json

import pytest
from mpmath import mpf

from main import main


def rows_of(text: str) -> list[dict]:
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_rho0_stieltjes_wigert(capsys, sw_options):
    assert main(["rho0", *sw_options, "--tol", "1e-25"]) == 0
    rows = rows_of(capsys.readouterr().out)
    assert [row["route"] for row in rows] == ["finite-inner-sums", "inner-phi-series"]
    for row in rows:
        assert row["family"] == "stieltjes-wigert"
        assert mpf("0.3430") < mpf(row["l"]) < mpf("0.3440")
        assert row["K0"] == ""


def test_rho0_freud_prints_k0(capsys):
    assert main(["rho0", "--family", "freud-quartic", "--tol", "1e-15", "--output", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data) == 2
    assert data[0]["K0"].startswith("1.85407467")
    assert mpf("1.2205") < mpf(data[0]["value"]) < mpf("1.2211")


def test_rho0_al_salam_carlitz_needs_a(capsys):
    assert main(["rho0", "--family", "al-salam-carlitz", "--q", "0.5"]) == 2
    assert "needs --a" in capsys.readouterr().err


def test_rho0_al_salam_carlitz_bad_a(capsys):
    assert main(["rho0", "--family", "al-salam-carlitz", "--q", "0.5", "--a", "3"]) == 2
    assert "ConfigError" in capsys.readouterr().err


def test_rho0_unknown_family(capsys):
    assert main(["rho0", "--family", "file", "--path", "m.txt"]) == 2


def test_lambda_needs_q(capsys):
    assert main(["lambda", "--family", "stieltjes-wigert"]) == 2
    assert "invalid configuration" in capsys.readouterr().err


def test_lambda_rejects_q_outside_unit_interval(capsys):
    assert main(["lambda", "--family", "stieltjes-wigert", "--q", "1.5"]) == 2


def test_rho0_q_and_k_weight_must_agree(capsys):
    assert main(["rho0", "--family", "stieltjes-wigert", "--q", "0.5", "--k-weight", "2"]) == 2
    assert "invalid configuration" in capsys.readouterr().err


def test_lambda_rejects_nonpositive_k_weight(capsys):
    assert main(["lambda", "--family", "stieltjes-wigert", "--k-weight", "-1", "--N-max", "2"]) == 2
    assert "k_weight must be positive" in capsys.readouterr().err


def test_lambda_from_k_weight(capsys):
    assert main(["lambda", "--family", "stieltjes-wigert", "--k-weight", "1", "--N-max", "2", "--tol", "1e-15"]) == 0
    assert len(rows_of(capsys.readouterr().out)) == 3


def test_lambda_stieltjes_wigert(capsys, sw_options):
    assert main(["lambda", *sw_options, "--N-max", "6", "--tol", "1e-15"]) == 0
    text = capsys.readouterr().out
    rows = rows_of(text)
    assert [int(row["N"]) for row in rows] == list(range(7))
    assert abs(mpf(rows[0]["midpoint"]) - mpf(2).sqrt()) < mpf("1e-15")
    assert mpf(rows[-1]["midpoint"]) > mpf("0.3435")
    assert "# s=" in text
    assert "method=" in text


def test_lambda_file(capsys, chebyshev_file):
    assert main(["lambda", "--family", "file", "--path", str(chebyshev_file), "--N-max", "2", "--tol", "1e-30"]) == 0
    text = capsys.readouterr().out
    rows = rows_of(text)
    assert len(rows) == 3
    assert mpf(rows[0]["lo"]) == 1
    assert abs(mpf(rows[1]["midpoint"]) - mpf("0.25")) < mpf("1e-29")
    expected = (mpf("1.125") - mpf("1.015625").sqrt()) / 2
    assert abs(mpf(rows[2]["midpoint"]) - expected) < mpf("1e-29")
    assert "# s=" not in text
    assert "# probe=inconclusive" in text


def test_lambda_file_beyond_its_moments(capsys, chebyshev_file):
    assert main(["lambda", "--family", "file", "--path", str(chebyshev_file), "--N-max", "3"]) == 4


def test_lambda_not_positive_definite(capsys, indefinite_file):
    assert main(["lambda", "--family", "file", "--path", str(indefinite_file), "--N-max", "1"]) == 4
    assert "NotPositiveDefinite" in capsys.readouterr().err


def test_lambda_jacobi_json(capsys, jacobi_file, tmp_path):
    out = tmp_path / "lambda.json"
    args = ["lambda", "--family", "jacobi", "--path", str(jacobi_file), "--N-max", "4", "--output", "json", "--out", str(out)]
    assert main(args) == 0
    assert capsys.readouterr().out == ""
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["family"] == "jacobi"
    assert len(data["sequence"]) == 5
    assert data["extrapolation"]["method"] in ("aitken", "fallback")
    assert data["probe"]["verdict"] in ("indeterminate-consistent", "determinate-consistent", "inconclusive")


def test_figure1_single_point(capsys):
    args = ["figure1", "--q-grid", "0.5", "--N-max", "5", "--tol", "1e-15", "--output", "json", "--verbose"]
    assert main(args) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data) == 1
    assert data[0]["error"] == ""
    assert mpf(data[0]["lambda_last"]) > mpf(data[0]["l"])
    assert mpf("0.3430") < mpf(data[0]["l"]) < mpf("0.3440")
    assert len(data[0]["sequence"]) == 6


def test_figure1_bad_grid(capsys):
    assert main(["figure1", "--q-grid", "0.5:0:0.9"]) == 2


def test_verify_single_suite(capsys):
    assert main(["verify", "--suite", "triple-product"]) == 0
    rows = rows_of(capsys.readouterr().out)
    assert rows == [{"suite": "triple-product", "passed": "True", "checks": "16", "detail": ""}]


def test_verify_unknown_suite(capsys):
    assert main(["verify", "--suite", "nope"]) == 2


def test_verify_impossible_tolerance(capsys):
    assert main(["verify", "--tol", "1e-40", "--prec-bits", "64"]) == 3
    assert "PrecisionExhausted" in capsys.readouterr().err


def test_missing_command():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
