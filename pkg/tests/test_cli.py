"""Command line interface: dispatch, reports, exit codes, JSON schema."""

import json
from pathlib import Path

import pytest

from mvop.cli import main, run
from mvop.dsl import parse_spec

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "mvop" / "data"


def read_data(name: str) -> str:
    return (DATA_DIR / name).read_text()


class TestRun:
    def test_jac2_file_reports_darboux_subchecks(self):
        doc = parse_spec(read_data("jac2.mvop"))
        report = run(doc, n_max=5)
        assert report["ok"]
        darboux = [c for c in report["checks"] if c["kind"] == "darboux"]
        assert len(darboux) == 7
        assert all(c["status"] == "pass" for c in darboux)

    def test_intertwine_and_entry_check_kinds(self):
        text = (
            "weight w1 = laguerre(alpha=1/2)\n"
            "weight w2 = laguerre(alpha=3/2)\n"
            "op T = d^1 - 1\n"
            "check intertwine(T, w1, w2)\n"
            "check entry(LAG2DIAG)\n"
        )
        report = run(parse_spec(text), n_max=4)
        assert report["ok"]
        inter = next(c for c in report["checks"] if c["kind"] == "intertwine")
        assert "lambda_n = -1" in inter["detail"]
        assert sum(1 for c in report["checks"] if c["kind"] == "entry") == 6

    def test_perturbed_factor_fails_and_names_cell(self):
        text = read_data("jac2.mvop")
        # bump the constant term of V: kappa -> kappa + 1 in cell (1,1)
        assert "op V = d^1*[x-1, 2; 0, 1+x] + [kappa, 0;" in text
        bad = text.replace(
            "op V = d^1*[x-1, 2; 0, 1+x] + [kappa, 0;",
            "op V = d^1*[x-1, 2; 0, 1+x] + [kappa+1, 0;",
        )
        report = run(parse_spec(bad), n_max=4)
        assert not report["ok"]
        fact = next(c for c in report["checks"] if "factorization" in c["name"])
        assert fact["status"] == "fail"
        assert "d^0 cell (0,0)" in fact["detail"]

    def test_engine_error_becomes_failed_check(self):
        # a structurally bad check: decompose a matrix operator (shape error)
        text = (
            "weight w1 = laguerre(alpha=1/2)\n"
            "weight w2 = laguerre(alpha=3/2)\n"
            "weight WW = dsum(w1, w2)\n"
            "op T = d^1*[0, 1; 0, 0]\n"
            "check decompose(T, w1, w2)\n"
        )
        report = run(parse_spec(text), n_max=4)
        assert not report["ok"]
        assert report["checks"][0]["status"] == "error"
        assert "ShapeError" in report["checks"][0]["detail"]

    def test_exit_status_is_conjunction(self):
        text = (
            "check classify(laguerre(alpha=1/2), laguerre(alpha=3/2), expect=true)\n"
            "check classify(laguerre(alpha=1/2), laguerre(alpha=1/3), expect=true)\n"
        )
        report = run(parse_spec(text), n_max=4)
        statuses = [c["status"] for c in report["checks"]]
        assert statuses == ["pass", "fail"]
        assert report["ok"] is False


class TestSchema:
    def test_reports_validate(self):
        jsonschema = pytest.importorskip("jsonschema")
        schema = json.loads(read_data("report-schema.json"))
        doc = parse_spec(read_data("lag2diag.mvop"))
        report = run(doc, n_max=4)
        jsonschema.validate(report, schema)
        report_bad = run(
            parse_spec("check classify(laguerre(alpha=1/2), laguerre(alpha=1/3), expect=true)\n"),
            n_max=4,
        )
        jsonschema.validate(report_bad, schema)


class TestMain:
    def test_verify_exit_zero(self, capsys):
        rc = main(["verify", str(DATA_DIR / "geg2.mvop"), "--nmax", "5"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "OK" in out

    def test_verify_json_output(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        rc = main(
            [
                "verify",
                str(DATA_DIR / "lag2diag.mvop"),
                "--nmax",
                "4",
                "--format",
                "json",
                "--out",
                str(out_path),
            ]
        )
        assert rc == 0
        report = json.loads(out_path.read_text())
        assert report["ok"] and report["nmax"] == 4

    def test_verify_params_override(self, capsys):
        rc = main(
            [
                "verify",
                str(DATA_DIR / "lag2diag.mvop"),
                "--params",
                "alpha=5/2",
                "--nmax",
                "4",
            ]
        )
        assert rc == 0

    def test_entry_subcommand(self, capsys):
        rc = main(["entry", "GEG2", "--nmax", "4"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "Gram-orthogonal" in out

    def test_search_subcommand_prints_basis(self, capsys):
        rc = main(
            ["search", "laguerre(alpha=1/2)", "laguerre(alpha=3/2)", "--order", "1"]
        )
        out = capsys.readouterr().out
        assert rc == 0
        assert "basis [d^1 - 1]" in out

    def test_classify_subcommand(self, capsys):
        rc = main(
            ["classify", "hermite(b=0)", "hermite(b=1)"]
        )
        out = capsys.readouterr().out
        assert rc == 0
        assert "false" in out

    def test_parse_error_exit_two(self, tmp_path, capsys):
        p = tmp_path / "bad.mvop"
        p.write_text("op T = d^\n")
        rc = main(["verify", str(p)])
        assert rc == 2
        assert "parse error" in capsys.readouterr().err

    def test_missing_file_exit_two(self, capsys):
        rc = main(["verify", "/nonexistent/file.mvop"])
        assert rc == 2

    def test_failing_document_exit_one(self, tmp_path):
        p = tmp_path / "fail.mvop"
        p.write_text("check classify(laguerre(alpha=1/2), laguerre(alpha=1/3), expect=true)\n")
        rc = main(["verify", str(p)])
        assert rc == 1
