import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import InvalidWordError, ParseError, PreconditionError, SideMismatchError
from src.words import (FiniteWord, Letter, Order, append, classify_one_sided, compare, compute_h_partition, concat,
                       enumerate_words, extension, inverse_closure, invert, make_one_sided, make_word,
                       parse_letters, parse_two_sided, parse_word, side_of)
from testing.conftest import R1_PARTITION, load

R1 = load("r1.alg")
R1_H = compute_h_partition(R1, R1_PARTITION)
R1_WORDS = enumerate_words(R1, 6)


def word(A, text, anchor=None, sign=1):
    return make_word(A, text, anchor, sign)


def test_parse_letters_powers():
    assert parse_letters("a b^-2") == (Letter("a"), Letter("b", True), Letter("b", True))
    with pytest.raises(ParseError):
        parse_letters("a^0")
    with pytest.raises(ParseError):
        parse_letters("a^x")


def test_valid_words(kronecker, r1):
    w = word(kronecker, "a b^-1")
    assert w.anchor == "2"
    assert w.end == "2"
    assert word(r1, "b a^-1 b^-1").text == "b a^-1 b^-1"


def test_relation_is_rejected_with_position(r1):
    with pytest.raises(InvalidWordError) as excinfo:
        word(r1, "b a a")
    assert excinfo.value.position == 1
    assert "a a" in excinfo.value.reason


def test_cancellation_and_walks(kronecker, r1):
    with pytest.raises(InvalidWordError, match="cancels"):
        word(r1, "a a^-1")
    with pytest.raises(InvalidWordError, match="not composable"):
        word(kronecker, "a b")
    with pytest.raises(InvalidWordError, match="anchor"):
        word(kronecker, "a", anchor="1")


def test_inverse_relation(r1):
    # (a b)^-1 = b^-1 a^-1
    with pytest.raises(InvalidWordError, match="inverse relation"):
        word(r1, "b^-1 a^-1")
    assert word(r1, "a^-1 b^-1").text == "a^-1 b^-1"


def test_trivial_words(r1):
    assert parse_word(r1, "1[S,+1]").sign == 1
    assert parse_word(r1, "1[S,-1]").sign == -1
    with pytest.raises(InvalidWordError):
        make_word(r1, [], None)
    with pytest.raises(PreconditionError):
        FiniteWord("S", (), "S", 0)


def test_concat_checks_junction(r1):
    with pytest.raises(InvalidWordError):
        concat(r1, word(r1, "b a^-1"), word(r1, "a"))
    assert concat(r1, word(r1, "b"), word(r1, "a^-1 b^-1")).text == "b a^-1 b^-1"


def test_lambda2_bridge_word(lambda2):
    bridge = concat(lambda2, concat(lambda2, word(lambda2, "e d^-1"), word(lambda2, "e g")), word(lambda2, "a b^-1"))
    assert bridge.text == "e d^-1 e g a b^-1"


def test_h_partition_paper_choice(r1):
    H = compute_h_partition(r1, R1_PARTITION)
    assert H.to_tokens() == {"S": {"a": -1, "a^-1": -1, "b": 1, "b^-1": 1}}


def test_h_partition_kronecker(kronecker):
    H = compute_h_partition(kronecker)
    assert H.to_tokens() == {"1": {"a^-1": 1, "b^-1": -1}, "2": {"a": 1, "b": -1}}


def test_h_partition_lambda2_separates_parallel_arrows(lambda2):
    H = compute_h_partition(lambda2)
    assert H.side("3", Letter("a")) == -H.side("3", Letter("b"))


def test_h_partition_rejects_unknown_override(r1):
    with pytest.raises(PreconditionError):
        compute_h_partition(r1, {"z": 1})


def test_sides(r1):
    assert side_of(r1, R1_H, word(r1, "b a^-1")) == 1
    assert side_of(r1, R1_H, make_one_sided(r1, [], parse_letters("a b^-1"))) == -1
    with pytest.raises(SideMismatchError):
        side_of(r1, R1_H, word(r1, "b"), at="T")


def test_order_examples(r1):
    assert compare(r1, R1_H, word(r1, "b a^-1"), word(r1, "b")) == Order.LT
    minus = make_word(r1, [], "S", -1)
    assert compare(r1, R1_H, word(r1, "a^-1"), minus) == Order.LT
    assert compare(r1, R1_H, minus, word(r1, "a")) == Order.LT


@pytest.mark.parametrize("n", range(1, 11))
def test_infinite_word_above_its_powers(r1, n):
    infinite = make_one_sided(r1, [], parse_letters("a b^-1"))
    finite = word(r1, " ".join(["a b^-1"] * n))
    assert compare(r1, R1_H, infinite, finite) == Order.GT


def test_compare_needs_common_chain(r1):
    with pytest.raises(SideMismatchError):
        compare(r1, R1_H, word(r1, "a"), word(r1, "b"))


def test_one_sided_canonical_form(r1):
    w = make_one_sided(r1, parse_letters("b a b^-1 a"), parse_letters("b^-1 a"))
    assert w.prefix_letters == (Letter("b"),)
    assert w.period == parse_letters("a b^-1")
    assert w.text == "b | (a b^-1)^inf"


def test_one_sided_primitive_period(r1):
    w = make_one_sided(r1, [], parse_letters("a b^-1 a b^-1"))
    assert w.period == parse_letters("a b^-1")


def test_one_sided_rejects_bad_period(r1):
    with pytest.raises(InvalidWordError):
        make_one_sided(r1, [], parse_letters("a"))
    with pytest.raises(InvalidWordError):
        make_one_sided(r1, [], [])


def test_expanding_end_of_figure_two_word(r1):
    shape = classify_one_sided(make_one_sided(r1, parse_letters("b"), parse_letters("a b^-1")))
    assert shape.kind == "expanding"
    assert shape.letter == Letter("b")
    assert shape.period == parse_letters("a b^-1")


def test_two_sided_figure_two(r1):
    q = parse_two_sided(r1, R1_H, "inf^(b a^-1) . b (a b^-1)^inf")
    assert q.left.period == parse_letters("a b^-1")
    assert q.right.prefix_letters == (Letter("b"),)
    assert q.text == "inf^(b a^-1) . b (a b^-1)^inf"
    assert not q.periodic


def test_two_sided_side_mismatch(r1):
    with pytest.raises(SideMismatchError):
        parse_two_sided(r1, R1_H, "b . a")
    with pytest.raises(ParseError):
        parse_two_sided(r1, R1_H, "a b")


def test_extensions(r1):
    assert extension(r1, R1_H, word(r1, "b"), inverse=False) == Letter("a")
    assert extension(r1, R1_H, word(r1, "b a"), inverse=False) is None
    assert extension(r1, R1_H, word(r1, "b"), inverse=True) == Letter("a", True)
    assert inverse_closure(r1, R1_H, word(r1, "b")).text == "b a^-1 b^-1"


def test_enumerate_words_are_valid_and_distinct(corpus_algebra):
    words = enumerate_words(corpus_algebra, 4)
    keys = [(w.anchor, w.key) for w in words]
    assert len(keys) == len(set(keys))
    for w in words:
        if w.letters:
            assert make_word(corpus_algebra, list(w.letters)).key == w.key


def test_order_laws_sampled(corpus_algebra):
    A = corpus_algebra
    H = compute_h_partition(A)
    chains = {}
    for w in enumerate_words(A, 5):
        chains.setdefault((w.anchor, side_of(A, H, w)), []).append(w)
    chains = [c for c in chains.values() if len(c) > 1]
    rng = random.Random(42)
    for _ in range(1000):
        chain = rng.choice(chains)
        a, b, c = (rng.choice(chain) for _ in range(3))
        ab = compare(A, H, a, b)
        assert ab == -compare(A, H, b, a)
        assert (ab == Order.EQ) == (a.key == b.key)
        if ab <= Order.EQ and compare(A, H, b, c) <= Order.EQ:
            assert compare(A, H, a, c) <= Order.EQ


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(R1_WORDS))
def test_inversion_is_an_involution(w):
    assert invert(invert(w)) == w


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([w for w in R1_WORDS if w.letters]), st.integers(min_value=0, max_value=3))
def test_canonical_form_is_idempotent(prefix, repeats):
    period = parse_letters("a b^-1")
    try:
        w = make_one_sided(R1, prefix.letters + period * repeats, period)
    except InvalidWordError:
        return
    assert make_one_sided(R1, w.prefix_letters, w.period) == w


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(R1_WORDS))
def test_extension_moves_in_the_right_direction(w):
    for inverse, expected in ((True, Order.GT), (False, Order.LT)):
        letter = extension(R1, R1_H, w, inverse)
        if letter is not None:
            assert compare(R1, R1_H, w, append(R1, w, letter)) == expected
