import itertools

import pytest

from src.bands import normalize_band
from src.errors import PreconditionError, SideMismatchError
from src.homs import admissible_triples, hom_basis, hom_count, pointed_morphism_exists
from src.repmod import band_module, hom_dimension_oracle, is_homomorphism, string_module
from src.words import enumerate_words, make_word, parse_letters
from testing.conftest import load


def modules(A, u, v):
    return string_module(A, make_word(A, u)), string_module(A, make_word(A, v))


def test_kronecker_hom_dimensions(kronecker):
    P, R = modules(kronecker, "a b^-1", "a")
    assert len(hom_basis(P, P)) == 1
    assert hom_basis(R, P) == []
    [g] = hom_basis(P, R)
    assert g.triple.text == "a @ u[0] -> v[0] (forward)"
    assert g.triple.node_map == ((0, 0), (1, 1))
    assert is_homomorphism(P, R, g.matrices)


def test_identity_is_a_graph_map(r1):
    w = make_word(r1, "b a^-1")
    triples = admissible_triples(r1, w, w)
    assert any(t.length == len(w) and not t.reversed for t in triples)


def test_hom_count_matches_oracle(kronecker):
    u, v = make_word(kronecker, "a b^-1 a"), make_word(kronecker, "a")
    found, expected = hom_count(kronecker, u, v)
    assert found == expected


@pytest.mark.parametrize("name, bound", [("r1.alg", 3), ("lambda2.alg", 3), ("g23.alg", 3)])
def test_graph_maps_span_hom(name, bound):
    A = load(name)
    words = [w for w in enumerate_words(A, bound) if w.letters]
    for u, v in itertools.product(words, repeat=2):
        Mu, Mv = string_module(A, u), string_module(A, v)
        hom_basis(Mu, Mv)


def test_hom_basis_needs_string_modules(kronecker, QQ):
    band = normalize_band(kronecker, parse_letters("a b^-1"))
    B = band_module(kronecker, band, QQ.one, 1, QQ)
    M = string_module(kronecker, make_word(kronecker, "a"), QQ)
    with pytest.raises(PreconditionError):
        hom_basis(B, M)


def test_pointed_morphisms(kronecker):
    P, R = modules(kronecker, "a b^-1", "a")
    assert pointed_morphism_exists(P, P.element(1), R, R.element(1)).exists
    assert not pointed_morphism_exists(R, R.element(0), P, P.element(0)).exists
    with pytest.raises(SideMismatchError):
        pointed_morphism_exists(P, P.element(0), R, R.element(1))


def test_pointed_morphism_matrices_commute(kronecker):
    P, R = modules(kronecker, "a b^-1", "a")
    result = pointed_morphism_exists(P, P.element(1), R, R.element(1))
    assert is_homomorphism(P, R, result.matrices)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["r1.alg", "lambda2.alg"])
def test_graph_maps_count_hom_up_to_length_six(name):
    A = load(name)
    words = [w for w in enumerate_words(A, 6) if w.letters]
    for u, v in itertools.product(words, repeat=2):
        Mu, Mv = string_module(A, u), string_module(A, v)
        maps = hom_basis(Mu, Mv)
        assert len(maps) == len(admissible_triples(A, u, v)) == hom_dimension_oracle(Mu, Mv), (u.text, v.text)
        assert all(is_homomorphism(Mu, Mv, g.matrices) for g in maps)
