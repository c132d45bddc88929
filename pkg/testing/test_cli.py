import json

import pytest

from src.reports import (BandsReport, HomReport, ModuleReport, TruncationReport, VerdictReport, WordOfReport)
from string_algebra_workbench import StringAlgebraWorkbench, UsageError, run
from testing.conftest import corpus_path

R1_OVERRIDE = "b=1,b^-1=1,a=-1,a^-1=-1"
FIGURE_TWO = "inf^(b a^-1) . b (a b^-1)^inf"


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("STRING_ALGEBRA_FIELD", "STRING_ALGEBRA_SEED", "STRING_ALGEBRA_MAX_LEN"):
        monkeypatch.delenv(name, raising=False)


def run_json(capsys, *argv):
    code = run(["--format", "json", *argv])
    return code, capsys.readouterr().out


def test_domestic_text(capsys):
    assert run(["domestic", corpus_path("lambda2.alg")]) == 0
    assert capsys.readouterr().out.strip() == "Domestic(2)"


def test_non_domestic_text(capsys):
    assert run(["domestic", corpus_path("g23.alg")]) == 0
    assert capsys.readouterr().out.startswith("NonDomestic(witness: [")


def test_bridge_dot_matches_golden_file(capsys):
    assert run(["bridge", corpus_path("lambda2.alg"), "--dot"]) == 0
    with open(corpus_path("lambda2_bridge.dot")) as f:
        assert capsys.readouterr().out == f.read()


def test_bands_json(capsys):
    code, out = run_json(capsys, "bands", corpus_path("r1.alg"))
    assert code == 0
    report = BandsReport.model_validate_json(out)
    assert report.bands == ["a b^-1", "b a^-1"]
    assert report.domestic and report.n == 1


def test_empty_file_is_a_usage_error(tmp_path, capsys):
    path = tmp_path / "empty.alg"
    path.write_text("")
    assert run(["domestic", str(path)]) == 2
    assert "empty" in capsys.readouterr().err


def test_missing_file_is_a_usage_error():
    assert run(["bands", "no/such/file.alg"]) == 2


def test_unknown_subcommand_is_a_usage_error():
    assert run(["frobnicate"]) == 2


def test_dot_format_outside_bridge(capsys):
    assert run(["--format", "dot", "domestic", corpus_path("r1.alg")]) == 2


def test_unknown_bound(capsys):
    assert run(["--bounds", "depth=3", "bands", corpus_path("r1.alg")]) == 2


def test_validate_reports_violations(tmp_path, capsys):
    path = tmp_path / "k3.alg"
    path.write_text("algebra K3\nvertices: 1 2\narrow a: 1 -> 2\narrow b: 1 -> 2\narrow c: 1 -> 2\n")
    code, out = run_json(capsys, "validate", str(path))
    assert code == 1
    axioms = {v["axiom"] for v in json.loads(out)["violations"]}
    assert axioms == {"in-degree", "out-degree"}


def test_validate_passes_on_corpus(capsys):
    assert run(["validate", corpus_path("lambda2.alg")]) == 0


def test_invalid_word_is_a_domain_error(capsys):
    assert run(["hom", corpus_path("a1tilde.alg"), "a b", "a"]) == 1
    assert "error" in capsys.readouterr().err


def test_hom_json(capsys):
    code, out = run_json(capsys, "hom", corpus_path("a1tilde.alg"), "a b^-1", "a")
    assert code == 0
    report = HomReport.model_validate_json(out)
    assert report.count == report.oracle_count == 1


def test_band_module_json(capsys):
    code, out = run_json(capsys, "module", corpus_path("a1tilde.alg"), "--band", "a b^-1", "--lambda", "2",
                         "--layers", "2")
    assert code == 0
    report = ModuleReport.model_validate_json(out)
    assert report.matrices["b"] == [["2", "1"], ["0", "2"]]
    assert report.relations_vanish


def test_word_of_json(capsys):
    code, out = run_json(capsys, "word-of", corpus_path("a1tilde.alg"), "--word", "a", "--node", "0")
    assert code == 0
    report = WordOfReport.model_validate_json(out)
    assert report.right == "a"
    assert report.word == ". a"


def test_pp_over_gf5(capsys):
    code, out = run_json(capsys, "--field", "GF(5)", "pp", corpus_path("a1tilde.alg"), ". a b^-1",
                         "--word", "a b^-1", "--node", "0")
    assert code == 0
    report = json.loads(out)
    assert report["satisfied"] is True
    assert report["dimension"] == 1


def test_ringel_truncate(capsys):
    code, out = run_json(capsys, "--partition", R1_OVERRIDE, "ringel", "truncate", corpus_path("r1.alg"),
                         FIGURE_TWO, "--level", "2")
    assert code == 0
    report = TruncationReport.model_validate_json(out)
    assert report.truncation == "b a^-1 b a^-1 b a b^-1 a b^-1"
    assert report.anchor_node == 4


def test_ringel_pp_with_oracle(capsys):
    code, out = run_json(capsys, "--partition", R1_OVERRIDE, "ringel", "pp", corpus_path("r1.alg"), FIGURE_TWO,
                         "b a^-1 . b a b^-1", "--oracle")
    assert code == 0
    report = VerdictReport.model_validate_json(out)
    assert report.verdict == "InType"
    assert report.phi == "(b a^-1.b a b^-1)"
    assert report.oracle.verdict == "InType"


def test_ringel_classify(capsys):
    code, out = run_json(capsys, "--partition", R1_OVERRIDE, "ringel", "classify", corpus_path("r1.alg"),
                         FIGURE_TWO, "--string", "b a^-1 b a b^-1", "--node", "2")
    assert code == 0
    assert VerdictReport.model_validate_json(out).verdict == "InType"


def test_schema_lists_every_report(capsys):
    assert run(["schema"]) == 0
    schemas = json.loads(capsys.readouterr().out)
    assert "audit" in schemas
    assert schemas["bands"]["title"] == "BandsReport"


def test_workbench_rejects_missing_file():
    with pytest.raises(UsageError):
        StringAlgebraWorkbench().load("no/such/file.alg")
