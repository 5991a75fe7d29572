import csv
import io
import json

import numpy as np
import pytest

from ospq_racah import cli
from ospq_racah import racah as rc
from ospq_racah.polyfamilies import ClassicalBIParams, classical_bi_coeffs
from ospq_racah.verify import VerifyConfig, run


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _json(capsys, *argv):
    code, out, _ = _run(capsys, *argv)
    assert code == 0
    return json.loads(out)


def test_eval_qbi_degree_zero(capsys):
    d = _json(capsys, "eval", "--family", "qbi", "--n", "0")
    assert d["schema_version"] == 1
    assert [r["value"] for r in d["rows"]] == [1.0] * len(cli.DEFAULT_X)


def test_eval_bi_degree_one_at_origin(capsys):
    d = _json(capsys, "eval", "--family", "bi", "--n", "1", "--x", "0")
    A0 = classical_bi_coeffs(0, ClassicalBIParams(0.3, 0.7, -0.4, -0.2))[0]
    assert d["rows"][0]["value"] == pytest.approx(-0.3 + A0, rel=1e-15)


def test_eval_pracah_at_origin(capsys):
    d = _json(capsys, "eval", "--family", "pracah", "--s", "0", "--N", "5")
    assert len(d["rows"]) == 6
    assert all(r["value"] == pytest.approx(1.0, abs=1e-14) for r in d["rows"])


def test_racah_one_dimensional(capsys):
    d = _json(capsys, "racah", "--N", "0")
    assert d["coefficients"] == [[1.0]]


def test_racah_all_methods(capsys):
    d = _json(capsys, "racah", "--N", "4", "--method", "all")
    res = d["residuals"]
    assert res["cross_method"]["closed_vs_diag"] <= 1e-8
    assert set(res["cross_method"]) == {"closed_vs_diag", "closed_vs_tensor", "diag_vs_tensor"}
    assert res["orthogonality"] <= 1e-8
    for key in ("q", "N", "mu", "eps", "method", "coefficients"):
        assert key in d


def test_racah_round_trip_residual_claims(capsys):
    d = _json(capsys, "racah", "--N", "5", "--mu1", "0.45", "--eps2", "-1")
    W = np.array(d["coefficients"])
    assert W.shape == (6, 6)
    again = rc.orthogonality_check(rc.RacahTable(5, W, "closed"))
    assert again <= 2 * d["residuals"]["orthogonality"] + 1e-300


def test_rep_round_trip(capsys):
    d = _json(capsys, "rep", "--N", "4")
    assert len(d["lambda"]) == 5 and d["U"][0] == 0.0 and d["U"][-1] == 0.0
    assert max(d["residuals"].values()) <= 1e-9


def test_output_is_deterministic(capsys):
    first = _run(capsys, "racah", "--N", "3", "--method", "all")[1]
    second = _run(capsys, "racah", "--N", "3", "--method", "all")[1]
    assert first == second


def test_csv_is_bit_faithful(capsys):
    d = _json(capsys, "racah", "--N", "3")
    code, out, _ = _run(capsys, "racah", "--N", "3", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 16
    W = np.array(d["coefficients"])
    for r in rows:
        assert float(r["value"]) == W[int(r["s"]), int(r["n"])]


def test_write_csv_format():
    buf = io.StringIO()
    cli.write_csv([{"a": 0.1, "b": 2}], buf)
    assert buf.getvalue() == "a,b\n0.10000000000000001,2\n"
    cli.write_csv([], buf)


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["racah", "--q", "1.5"],
    ["racah", "--N", "-1"],
    ["racah", "--eps1", "2"],
    ["eval", "--family", "qbi"],
    ["verify", "--suite", "nonsense"],
    ["eval", "--family", "pracah", "--N", "2", "--s", "3"],
    ["eval", "--n", "1", "--a", "0.5"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, out, _ = _run(capsys, *argv)
    assert code == 2
    assert out == ""


def test_degenerate_input_exits_1_with_error_field(capsys):
    code, out, err = _run(capsys, "eval", "--n", "3", "--a", "1", "--b", "1", "--c", "1", "--d", "1")
    assert code == 1
    d = json.loads(out)
    assert d["error"]["code"] == "degenerate_parameters"
    assert err


def test_verify_fast_passes():
    out = run("all", VerifyConfig(fast=True))
    assert out["passed"] and out["failed"] == []
    for checks in out["suites"].values():
        for c in checks:
            assert {"name", "residual", "threshold", "passed"} <= set(c)


def test_verify_negative_abcd_reports_structured_error():
    out = run("operator", VerifyConfig(fast=True, abcd=(-0.6, 0.4, 0.5, 0.3)))
    checks = {c["name"]: c for c in out["suites"]["operator"]}
    rel = checks["realization_relations"]
    assert rel["errors"][0]["code"] == "realization_requires_positive_abcd"
    assert rel["cases"] > 0
    # the eigenvalue checks still covered the extra parameter set
    assert checks["dz_eigenvalue"]["cases"] == rel["cases"] + 1
    assert out["passed"]


def test_verify_tol_override_can_fail(capsys):
    code, out, err = _run(capsys, "verify", "--suite", "limits", "--tol", "1e-30")
    assert code == 1
    assert "verification failed" in err
    assert json.loads(out)["passed"] is False
