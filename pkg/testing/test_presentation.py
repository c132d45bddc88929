import pytest

from src.bands import enumerate_bands
from src.errors import ParseError, PresentationError
from src.presentation import (build_presentation, from_json, parse_algebra, quotient_by_arrows, require_validated,
                              to_dsl, to_json, validate_string_algebra)
from testing.conftest import load


def test_corpus_shapes(r1, lambda2):
    assert r1.vertices == ("S",)
    assert len(r1.arrows) == 2
    assert len(r1.relations) == 3
    assert len(lambda2.vertices) == 4
    assert len(lambda2.arrows) == 5
    assert set(lambda2.relations) == {("d", "g"), ("g", "b")}


def test_corpus_validates(corpus_algebra):
    result = validate_string_algebra(corpus_algebra)
    assert result.ok
    assert result.violations == []
    assert result.presentation.validated


def test_nonzero_compositions_r1(r1):
    assert validate_string_algebra(r1).nonzero_compositions == [("b", "a")]


def test_three_parallel_arrows_break_degree_bounds():
    A = build_presentation("K3", ["1", "2"], [("a", "1", "2"), ("b", "1", "2"), ("c", "1", "2")])
    axioms = {v.axiom for v in validate_string_algebra(A).violations}
    assert axioms == {"in-degree", "out-degree"}


def test_two_compositions_through_a_loop():
    A = build_presentation("L", ["S"], [("a", "S", "S"), ("b", "S", "S")], [("b", "b"), ("a", "b")])
    result = validate_string_algebra(A)
    assert not result.ok
    axioms = {v.axiom for v in result.violations}
    assert "unique-composition" in axioms
    assert result.nonzero_compositions == []


def test_relation_free_cycle_is_reported():
    A = build_presentation("R", ["S"], [("a", "S", "S"), ("b", "S", "S")], [("a", "a"), ("b", "b")])
    violations = validate_string_algebra(A).violations
    assert [v.axiom for v in violations] == ["finite-dimension"]


def test_require_validated_lists_violations():
    A = build_presentation("K3", ["1", "2"], [("a", "1", "2"), ("b", "1", "2"), ("c", "1", "2")])
    with pytest.raises(PresentationError, match="more than two"):
        require_validated(A)


def test_parse_error_carries_location():
    with pytest.raises(ParseError) as excinfo:
        parse_algebra("algebra X\nvertices: 1 2\narow a: 1 -> 2\n")
    assert excinfo.value.line == 3


def test_missing_header():
    with pytest.raises(ParseError, match="header"):
        parse_algebra("vertices: 1\n")


def test_dangling_vertex():
    with pytest.raises(PresentationError, match="unknown vertex 3"):
        parse_algebra("algebra X\nvertices: 1 2\narrow a: 1 -> 3\n")


def test_relation_must_compose():
    text = "algebra X\nvertices: 1 2\narrow a: 1 -> 2\narrow b: 1 -> 2\nrelation: a b\n"
    with pytest.raises(PresentationError, match="not composable"):
        parse_algebra(text)


def test_comments_and_blank_lines():
    A = parse_algebra("# loops\nalgebra X\n\nvertices: S  # one vertex\narrow a: S -> S\nrelation: a a\n")
    assert A.arrow_names == ("a",)
    assert A.relations == (("a", "a"),)


def test_serialized_forms_agree(lambda2):
    assert to_json(parse_algebra(to_dsl(lambda2))) == to_json(lambda2)
    assert to_json(from_json(to_json(lambda2))) == to_json(lambda2)


def test_from_json_rejects_missing_fields():
    with pytest.raises(PresentationError):
        from_json({"name": "X", "vertices": ["1"]})


def test_quotient_of_lambda2_is_kronecker_shaped(lambda2):
    quotient = quotient_by_arrows(lambda2, ["d", "e", "g"])
    assert quotient.validated
    assert quotient.arrow_names == ("a", "b")
    assert quotient.vertices == lambda2.vertices
    assert quotient.relations == ()
    kronecker = load("a1tilde.alg")
    assert {b.text for b in enumerate_bands(quotient, 8).bands} == {b.text for b in enumerate_bands(kronecker, 8).bands}


def test_quotient_of_r1_is_band_free(r1):
    quotient = quotient_by_arrows(r1, ["a"])
    assert quotient.arrow_names == ("b",)
    assert quotient.relations == (("b", "b"),)
    assert enumerate_bands(quotient, 8).bands == ()


def test_quotient_rejects_unknown_arrow(r1):
    with pytest.raises(PresentationError):
        quotient_by_arrows(r1, ["z"])
