import pytest

from src.bands import (band_facts_audit, bridge_dot, bridge_quiver, enumerate_bands, invert_band, is_domestic,
                       letter_automaton, normalize_band, quotient_to_band, word_of_band)
from src.errors import NonDomesticError
from src.words import parse_letters
from testing.conftest import corpus_path, load


def texts(band_set):
    return {band.text for band in band_set.bands}


def test_letter_automaton_of_r1(r1):
    automaton = letter_automaton(r1)
    assert automaton.k == 1
    assert automaton.graph.number_of_nodes() == 4
    edges = {" ".join(l.token for l in u + v[-1:]) for u, v in automaton.graph.edges}
    assert edges == {"a b^-1", "b a", "b a^-1", "a^-1 b", "a^-1 b^-1", "b^-1 a"}


def test_letter_automaton_windows_grow_with_relations(g23):
    automaton = letter_automaton(g23)
    assert automaton.k == 2
    assert all(len(node) == 2 for node in automaton.graph.nodes)


def test_bands_of_r1(r1):
    result = enumerate_bands(r1, 8)
    assert texts(result) == {"a b^-1", "b a^-1"}
    assert not result.truncated


def test_bands_of_lambda2(lambda2):
    assert texts(enumerate_bands(lambda2, 10)) == {"a b^-1", "b a^-1", "d e^-1", "e d^-1"}


def test_g23_band_needs_length_eight(g23):
    band = normalize_band(g23, parse_letters("a b^-2 a b^-2 a b^-1"))
    assert band is not None
    assert len(band) == 8
    assert band not in enumerate_bands(g23, 7).bands
    result = enumerate_bands(g23, 8)
    assert band in result.bands
    assert result.truncated


def test_normalize_band_rejects_non_bands(r1):
    assert normalize_band(r1, parse_letters("a b^-1 a b^-1")) is None
    assert normalize_band(r1, parse_letters("b a")) is None
    assert normalize_band(r1, parse_letters("a a^-1")) is None
    assert normalize_band(r1, parse_letters("b^-1 a")).text == "a b^-1"


def test_invert_band(lambda2):
    band = normalize_band(lambda2, parse_letters("d e^-1"))
    assert invert_band(lambda2, band).text == "e d^-1"


@pytest.mark.parametrize("name, n", [("a1tilde.alg", 1), ("r1.alg", 1), ("lambda2.alg", 2)])
def test_domestic_corpus(name, n):
    result = is_domestic(load(name))
    assert result.domestic
    assert result.text == f"Domestic({n})"
    assert len(result.bands) == 2 * n


def test_g23_is_not_domestic(g23):
    result = is_domestic(g23)
    assert not result.domestic
    first, second = result.witness
    assert first != second
    assert result.text.startswith("NonDomestic(witness: [")


def test_lambda2_bridge_matches_golden_file(lambda2):
    quiver = bridge_quiver(lambda2)
    assert quiver.stable
    with open(corpus_path("lambda2_bridge.dot")) as f:
        assert bridge_dot(quiver) == f.read()


def test_lambda2_bridge_witness_is_a_string(lambda2):
    quiver = bridge_quiver(lambda2)
    cover = next(c for c in quiver.covers if c.lower.text == "e d^-1")
    assert cover.upper.text == "a b^-1"
    assert cover.witness_text == "e g"


def test_kronecker_bands_form_an_antichain(kronecker):
    quiver = bridge_quiver(kronecker)
    assert len(quiver.elements) == 2
    assert quiver.covers == []
    assert quiver.relations == {}


def test_bridge_requires_domestic(g23):
    with pytest.raises(NonDomesticError):
        bridge_quiver(g23)


def test_band_facts_hold_on_domestic_corpus(domestic_algebra):
    report = band_facts_audit(domestic_algebra, 10)
    assert report.passed, report.counterexamples
    assert report.checked["band_powers"] > 0


def test_band_facts_reject_g23(g23):
    with pytest.raises(NonDomesticError):
        band_facts_audit(g23)


def test_quotient_to_band(lambda2):
    band = normalize_band(lambda2, parse_letters("d e^-1"))
    quotient = quotient_to_band(lambda2, band)
    assert quotient.arrow_names == ("d", "e")
    assert texts(enumerate_bands(quotient, 8)) == {"d e^-1", "e d^-1"}


def test_word_of_band(r1):
    band = normalize_band(r1, parse_letters("a b^-1"))
    assert word_of_band(r1, band, 2).text == "a b^-1 a b^-1"
