"""Letters, finite and eventually periodic words, H-partitions and the chain order."""

import logging
import math
import re
from dataclasses import dataclass, field
from enum import IntEnum
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import (ConsistencyError, InvalidWordError, ParseError, PreconditionError,
                     SideMismatchError)
from .presentation import AlgebraPresentation, require_validated

logger = logging.getLogger(__name__)

TOKEN_PATTERN = re.compile(r"^(?P<arrow>[A-Za-z0-9_']+?)(?:\^(?P<power>-?\d+))?$")
EMPTY_PATTERN = re.compile(r"^1\[\s*(?P<vertex>[A-Za-z0-9_']+)\s*,\s*(?P<sign>[+-]?1)\s*\]$")
ONE_SIDED_PATTERN = re.compile(r"^(?P<prefix>[^|()]*?)\s*\|?\s*\((?P<period>[^()]+)\)\^inf$")
LEFT_INFINITE_PATTERN = re.compile(r"^inf\^\((?P<period>[^()]+)\)(?P<rest>.*)$")
RIGHT_INFINITE_PATTERN = re.compile(r"^(?P<rest>[^()]*?)\s*\((?P<period>[^()]+)\)\^inf$")


@dataclass(frozen=True, order=True)
class Letter:
    """An arrow read forwards (direct) or backwards (inverse)."""

    arrow: str
    inverse: bool = False

    @property
    def direct(self) -> bool:
        return not self.inverse

    @property
    def token(self) -> str:
        return f"{self.arrow}^-1" if self.inverse else self.arrow

    def inverted(self) -> "Letter":
        return Letter(self.arrow, not self.inverse)

    def left(self, A: AlgebraPresentation) -> str:
        arrow = A.arrow(self.arrow)
        return arrow.source if self.inverse else arrow.target

    def right(self, A: AlgebraPresentation) -> str:
        arrow = A.arrow(self.arrow)
        return arrow.target if self.inverse else arrow.source

    def __str__(self) -> str:
        return self.token


@dataclass(frozen=True)
class FiniteWord:
    """A finite string anchored at its left vertex.

    ``sign`` only distinguishes the trivial words 1_{S,1} and 1_{S,-1}; it is 0 for
    nonempty words.
    """

    anchor: str
    letters: Tuple[Letter, ...]
    end: str
    sign: int = 0

    def __post_init__(self):
        if self.letters:
            object.__setattr__(self, "sign", 0)
        elif self.sign not in (1, -1):
            raise PreconditionError("Empty words need a sign of +1 or -1")

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def is_empty(self) -> bool:
        return not self.letters

    @property
    def is_infinite(self) -> bool:
        return False

    def letter_at(self, i: int) -> Optional[Letter]:
        return self.letters[i] if 0 <= i < len(self.letters) else None

    def first_letters(self, n: int) -> Tuple[Letter, ...]:
        return self.letters[:n]

    @property
    def key(self) -> Tuple:
        return tuple(self.letters) if self.letters else (self.sign,)

    @property
    def text(self) -> str:
        if not self.letters:
            return f"1[{self.anchor},{'+1' if self.sign > 0 else '-1'}]"
        return " ".join(letter.token for letter in self.letters)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class OneSidedWord:
    """The infinite word ``prefix period period ...`` anchored at its left vertex.

    Instances built through :func:`make_one_sided` are canonical: the period is primitive
    and the prefix does not end with the period's last letter.
    """

    anchor: str
    prefix_letters: Tuple[Letter, ...]
    period: Tuple[Letter, ...]
    prefix_end: str

    @property
    def is_infinite(self) -> bool:
        return True

    @property
    def is_empty(self) -> bool:
        return False

    @property
    def prefix(self) -> FiniteWord:
        return FiniteWord(self.anchor, self.prefix_letters, self.prefix_end, 1)

    def letter_at(self, i: int) -> Optional[Letter]:
        if i < 0:
            return None
        if i < len(self.prefix_letters):
            return self.prefix_letters[i]
        return self.period[(i - len(self.prefix_letters)) % len(self.period)]

    def first_letters(self, n: int) -> Tuple[Letter, ...]:
        return tuple(self.letter_at(i) for i in range(n))

    @property
    def key(self) -> Tuple:
        return (tuple(self.prefix_letters), tuple(self.period))

    @property
    def text(self) -> str:
        period = " ".join(letter.token for letter in self.period)
        if not self.prefix_letters:
            return f"({period})^inf"
        prefix = " ".join(letter.token for letter in self.prefix_letters)
        return f"{prefix} | ({period})^inf"

    def __str__(self) -> str:
        return self.text


Word = Union[FiniteWord, OneSidedWord]


@dataclass(frozen=True)
class TwoSidedWord:
    """``w = u^-1 . v`` with u read leftwards and v rightwards from the anchor."""

    left: Word
    right: Word
    anchor: str

    @property
    def periodic(self) -> bool:
        u, v = self.left, self.right
        if not (u.is_infinite and v.is_infinite):
            return False
        if u.prefix_letters or v.prefix_letters:
            return False
        return tuple(letter.inverted() for letter in reversed(u.period)) == v.period

    @property
    def is_finite(self) -> bool:
        return not (self.left.is_infinite or self.right.is_infinite)

    @property
    def text(self) -> str:
        u, v = self.left, self.right
        if u.is_infinite:
            period = " ".join(l.inverted().token for l in reversed(u.period))
            rest = " ".join(l.inverted().token for l in reversed(u.prefix_letters))
            left = f"inf^({period}) {rest}".rstrip()
        else:
            left = " ".join(l.inverted().token for l in reversed(u.letters))
        if v.is_infinite:
            period = " ".join(l.token for l in v.period)
            rest = " ".join(l.token for l in v.prefix_letters)
            right = f"{rest} ({period})^inf".lstrip()
        else:
            right = " ".join(l.token for l in v.letters)
        return f"{left} . {right}".strip()

    def __str__(self) -> str:
        return self.text


class Order(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


@dataclass
class HPartition:
    """Side assignment of the letters entering each vertex.

    ``classes[S][letter]`` is +1 or -1. ``ambiguous`` lists vertices with more than one
    valid split of their letters.
    """

    classes: Dict[str, Dict[Letter, int]]
    ambiguous: Tuple[str, ...] = ()
    overridden: Dict[str, int] = field(default_factory=dict)

    def side(self, vertex: str, letter: Letter) -> int:
        try:
            return self.classes[vertex][letter]
        except KeyError:
            raise SideMismatchError(f"Letter {letter.token} does not enter vertex {vertex}")

    def letters_in(self, vertex: str, sign: int) -> List[Letter]:
        return sorted(letter for letter, side in self.classes.get(vertex, {}).items() if side == sign)

    def to_tokens(self) -> Dict[str, Dict[str, int]]:
        return {vertex: {letter.token: side for letter, side in sorted(letters.items())}
                for vertex, letters in sorted(self.classes.items())}


@dataclass(frozen=True)
class OneSidedShape:
    """Normal form ``stem letter period^inf`` of a one-sided word."""

    kind: str
    stem: Tuple[Letter, ...]
    letter: Optional[Letter]
    period: Tuple[Letter, ...]


# validity


def _violation(A: AlgebraPresentation, letters: Sequence[Letter]) -> Optional[Tuple[int, str]]:
    """Position and reason of the first defect of a letter sequence, if any."""
    for i, letter in enumerate(letters):
        if not A.has_arrow(letter.arrow):
            return i, f"unknown arrow {letter.arrow}"
        if i > 0:
            previous = letters[i - 1]
            if previous.right(A) != letter.left(A):
                return i, f"{previous.token} {letter.token} is not composable"
            if previous.arrow == letter.arrow and previous.inverse != letter.inverse:
                return i, f"{previous.token} {letter.token} cancels"
        for relation in A.relations:
            start = i - len(relation) + 1
            if start < 0:
                continue
            window = letters[start:i + 1]
            arrows = tuple(l.arrow for l in window)
            if all(l.direct for l in window) and arrows == relation:
                return start, f"relation {' '.join(relation)} met"
            if all(l.inverse for l in window) and arrows[::-1] == relation:
                return start, f"inverse relation {' '.join(relation)} met"
    return None


def is_valid_letters(A: AlgebraPresentation, letters: Sequence[Letter]) -> bool:
    return _violation(A, letters) is None


def _window(A: AlgebraPresentation) -> int:
    return max(2, A.max_relation_length)


def can_append(A: AlgebraPresentation, letters: Sequence[Letter], letter: Letter) -> bool:
    tail = tuple(letters[-_window(A):]) + (letter,)
    return _violation(A, tail) is None


def cyclically_valid(A: AlgebraPresentation, period: Sequence[Letter]) -> bool:
    """Whether every power of the cyclic word is a valid word."""
    if not period:
        return False
    repeats = max(2, -(-_window(A) // len(period)) + 1)
    return _violation(A, tuple(period) * repeats) is None


def primitive_root(letters: Sequence[Letter]) -> Tuple[Letter, ...]:
    letters = tuple(letters)
    n = len(letters)
    for p in range(1, n + 1):
        if n % p == 0 and letters[:p] * (n // p) == letters:
            return letters[:p]
    return letters


def parse_letters(tokens: Union[str, Sequence[str]]) -> Tuple[Letter, ...]:
    """Read tokens such as ``a``, ``b^-1`` or ``b^-2`` into letters.

    Raises:
        ParseError: On a malformed token
    """
    if isinstance(tokens, str):
        tokens = tokens.split()
    letters: List[Letter] = []
    for column, token in enumerate(tokens, start=1):
        match = TOKEN_PATTERN.match(token)
        if not match:
            raise ParseError(f"Invalid letter token {token!r}", 1, column)
        power = int(match.group("power") or 1)
        if power == 0:
            raise ParseError(f"Zero power in token {token!r}", 1, column)
        letters.extend([Letter(match.group("arrow"), power < 0)] * abs(power))
    return tuple(letters)


def _build(A: AlgebraPresentation, anchor: Optional[str], letters: Tuple[Letter, ...], sign: int = 1) -> FiniteWord:
    if not letters:
        if anchor is None:
            raise InvalidWordError("Empty word needs an anchor vertex")
        if anchor not in A.vertices:
            raise InvalidWordError(f"Unknown anchor vertex {anchor}")
        return FiniteWord(anchor, (), anchor, sign)
    defect = _violation(A, letters)
    if defect is not None:
        position, reason = defect
        raise InvalidWordError(f"Invalid word {' '.join(l.token for l in letters)}: {reason}", position, reason)
    left = letters[0].left(A)
    if anchor is not None and anchor != left:
        raise InvalidWordError(f"Word starts at {left}, not at anchor {anchor}", 0, "anchor mismatch")
    return FiniteWord(left, letters, letters[-1].right(A), 0)


def make_word(A: AlgebraPresentation,
              tokens: Union[str, Sequence[str], Sequence[Letter]],
              anchor: Optional[str] = None,
              sign: int = 1) -> FiniteWord:
    """Build and validate a finite word.

    Args:
        A: Presentation the word lives over
        tokens: Letter tokens (``"a b^-1"``) or Letter objects
        anchor: Left vertex; required for the empty word, checked otherwise
        sign: Side of the empty word (+1 for 1_{S,1}, -1 for 1_{S,-1})
    Returns:
        The validated word
    Raises:
        InvalidWordError: With the position and reason of the first violated condition
    """
    if tokens and all(isinstance(t, Letter) for t in tokens):
        letters = tuple(tokens)
    else:
        try:
            letters = parse_letters(tokens)
        except ParseError as e:
            raise InvalidWordError(str(e))
    for position, letter in enumerate(letters):
        if not A.has_arrow(letter.arrow):
            raise InvalidWordError(f"Unknown arrow {letter.arrow}", position, "unknown arrow")
    return _build(A, anchor, letters, sign)


def make_one_sided(A: AlgebraPresentation,
                   prefix: Sequence[Letter],
                   period: Sequence[Letter],
                   anchor: Optional[str] = None) -> OneSidedWord:
    """Validate ``prefix period^inf`` and return its canonical form.

    Raises:
        InvalidWordError: If the period is empty or the infinite word is not valid
    """
    prefix, period = tuple(prefix), tuple(period)
    if not period:
        raise InvalidWordError("One-sided words need a nonempty period")
    if not cyclically_valid(A, period):
        raise InvalidWordError(f"Period {' '.join(l.token for l in period)} is not cyclically valid")
    sample = prefix + period * max(2, -(-_window(A) // len(period)) + 1)
    word = _build(A, anchor, sample)
    period = primitive_root(period)
    prefix_list = list(prefix)
    while prefix_list and prefix_list[-1] == period[-1]:
        prefix_list.pop()
        period = (period[-1],) + period[:-1]
    prefix_end = prefix_list[-1].right(A) if prefix_list else word.anchor
    return OneSidedWord(word.anchor, tuple(prefix_list), period, prefix_end)


def parse_word(A: AlgebraPresentation, text: str, anchor: Optional[str] = None, sign: int = 1) -> Word:
    """Parse a finite word, ``1[S,+1]``, or a one-sided word ``prefix | (period)^inf``."""
    text = text.strip()
    match = EMPTY_PATTERN.match(text)
    if match:
        return make_word(A, [], match.group("vertex"), int(match.group("sign")))
    if text in ("", "1"):
        return make_word(A, [], anchor, sign)
    match = ONE_SIDED_PATTERN.match(text)
    if match:
        try:
            return make_one_sided(A, parse_letters(match.group("prefix")), parse_letters(match.group("period")), anchor)
        except ParseError as e:
            raise InvalidWordError(str(e))
    return make_word(A, text, anchor, sign)


def parse_two_sided(A: AlgebraPresentation, H: HPartition, text: str, anchor: Optional[str] = None) -> TwoSidedWord:
    """Parse ``inf^(E) u' . v' (F)^inf`` (either side may be finite) into ``u^-1 . v``.

    Raises:
        ParseError: If the dot separating the two halves is missing
    """
    if text.count(".") != 1:
        raise ParseError("Two-sided words need exactly one '.' marking the anchor", 1, 1)
    left_text, right_text = (part.strip() for part in text.split("."))
    try:
        match = LEFT_INFINITE_PATTERN.match(left_text)
        if match:
            left_period = parse_letters(match.group("period"))
            left_rest = parse_letters(match.group("rest"))
        else:
            left_period, left_rest = (), parse_letters(left_text)
        match = RIGHT_INFINITE_PATTERN.match(right_text)
        if match:
            right_period = parse_letters(match.group("period"))
            right_rest = parse_letters(match.group("rest"))
        else:
            right_period, right_rest = (), parse_letters(right_text)
    except ParseError as e:
        raise InvalidWordError(str(e))

    if anchor is None:
        if right_rest or right_period:
            anchor = (right_rest or right_period)[0].left(A)
        elif left_rest or left_period:
            anchor = (left_rest or left_period)[-1].right(A)
        else:
            raise InvalidWordError("Trivial two-sided word needs an anchor vertex")

    u_prefix = tuple(l.inverted() for l in reversed(left_rest))
    if left_period:
        u = make_one_sided(A, u_prefix, tuple(l.inverted() for l in reversed(left_period)), anchor)
    else:
        u = make_word(A, list(u_prefix), anchor, -1)
    if right_period:
        v = make_one_sided(A, right_rest, right_period, anchor)
    else:
        v = make_word(A, list(right_rest), anchor, 1)
    return make_two_sided(A, H, u, v)


def make_two_sided(A: AlgebraPresentation, H: HPartition, u: Word, v: Word) -> TwoSidedWord:
    """Check ``u^-1 . v``: common anchor, u in H_-1, v in H_1 and a valid junction.

    Raises:
        SideMismatchError: On anchor or side mismatch
        InvalidWordError: If u^-1 v is not a valid word
    """
    if u.anchor != v.anchor:
        raise SideMismatchError(f"Left word starts at {u.anchor} but right word at {v.anchor}")
    if side_of(A, H, u) != -1 or side_of(A, H, v) != 1:
        raise SideMismatchError(f"Need u in H_-1({u.anchor}) and v in H_1({v.anchor})")
    n = _window(A)
    junction = tuple(l.inverted() for l in reversed(u.first_letters(n))) + v.first_letters(n)
    defect = _violation(A, junction)
    if defect is not None:
        raise InvalidWordError(f"u^-1 v is not a valid word: {defect[1]}", defect[0], defect[1])
    return TwoSidedWord(u, v, u.anchor)


def invert(w: FiniteWord) -> FiniteWord:
    if w.is_empty:
        return FiniteWord(w.anchor, (), w.end, -w.sign)
    return FiniteWord(w.end, tuple(l.inverted() for l in reversed(w.letters)), w.anchor, 0)


def concat(A: AlgebraPresentation, w1: FiniteWord, w2: FiniteWord) -> FiniteWord:
    """Concatenate two finite words.

    Raises:
        InvalidWordError: If w1 does not end where w2 starts or the junction is invalid
    """
    if w1.end != w2.anchor:
        raise InvalidWordError(f"{w1.text} ends at {w1.end} but {w2.text} starts at {w2.anchor}",
                               len(w1), "not composable")
    if w1.is_empty:
        return w2
    if w2.is_empty:
        return w1
    n = _window(A)
    tail = w1.letters[-n:]
    defect = _violation(A, tail + w2.letters[:n])
    if defect is not None:
        position, reason = defect
        raise InvalidWordError(f"Invalid junction {w1.text} | {w2.text}: {reason}",
                               len(w1) - len(tail) + position, reason)
    return FiniteWord(w1.anchor, w1.letters + w2.letters, w2.end, 0)


def append(A: AlgebraPresentation, w: FiniteWord, letter: Letter) -> FiniteWord:
    """``w`` followed by ``letter``; the caller has checked validity."""
    anchor = w.anchor if w.letters else letter.left(A)
    return FiniteWord(anchor, w.letters + (letter,), letter.right(A), 0)


# partition and order


def _valid_split(A: AlgebraPresentation, letters: Sequence[Letter], sides: Sequence[int]) -> bool:
    for sign in (1, -1):
        members = [letter for letter, side in zip(letters, sides) if side == sign]
        directs = [l for l in members if l.direct]
        inverses = [l for l in members if l.inverse]
        if len(directs) > 1 or len(inverses) > 1:
            return False
        if directs and inverses and not A.is_relation((inverses[0].arrow, directs[0].arrow)):
            return False
    return True


def entering_letters(A: AlgebraPresentation, vertex: str) -> List[Letter]:
    """Letters with left vertex ``vertex``: incoming arrows and inverses of outgoing ones."""
    letters = [Letter(a.name, False) for a in A.incoming(vertex)]
    letters += [Letter(a.name, True) for a in A.outgoing(vertex)]
    return sorted(letters)


def compute_h_partition(A: AlgebraPresentation, override: Optional[Dict[str, int]] = None) -> HPartition:
    """Choose an H-partition at every vertex.

    Letters are ordered by arrow name, direct before inverse; the first valid assignment
    in the order that prefers +1 wins. ``override`` pins letter tokens to a side.

    Raises:
        PreconditionError: If the override names unknown letters or admits no valid partition
    """
    A = require_validated(A)
    override = dict(override or {})
    known = {Letter(a.name, inv).token for a in A.arrows for inv in (False, True)}
    unknown = sorted(set(override) - known)
    if unknown:
        raise PreconditionError(f"Partition override names unknown letters: {', '.join(unknown)}")

    classes: Dict[str, Dict[Letter, int]] = {}
    ambiguous = []
    for vertex in A.vertices:
        letters = entering_letters(A, vertex)
        valid = [sides for sides in product((1, -1), repeat=len(letters))
                 if _valid_split(A, letters, sides)
                 and all(override.get(l.token, s) == s for l, s in zip(letters, sides))]
        if not valid:
            raise PreconditionError(f"No valid H-partition at vertex {vertex} under the given override")
        splits = {frozenset(l for l, s in zip(letters, sides) if s == 1) for sides in valid}
        splits = {min(split, frozenset(letters) - split, key=sorted) for split in splits}
        if len(splits) > 1:
            ambiguous.append(vertex)
        classes[vertex] = dict(zip(letters, valid[0]))
    if ambiguous:
        logger.info("Several H-partitions possible at vertices %s; using the first", ", ".join(ambiguous))
    return HPartition(classes, tuple(ambiguous), override)


def side_of(A: AlgebraPresentation, H: HPartition, w: Word, at: Optional[str] = None) -> int:
    """The index i with ``w`` in the chain of H_i at its anchor.

    Raises:
        SideMismatchError: If ``at`` is given and differs from the anchor
    """
    if at is not None and at != w.anchor:
        raise SideMismatchError(f"Word anchored at {w.anchor}, not at {at}")
    if not w.is_infinite and w.is_empty:
        return w.sign
    return H.side(w.anchor, w.letter_at(0))


def _horizon(w1: Word, w2: Word) -> int:
    finite, periods = 0, []
    for w in (w1, w2):
        if w.is_infinite:
            finite = max(finite, len(w.prefix_letters))
            periods.append(len(w.period))
        else:
            finite = max(finite, len(w))
    return finite + (math.lcm(*periods) if periods else 1) + 1


def compare(A: AlgebraPresentation, H: HPartition, w1: Word, w2: Word) -> Order:
    """Order two words of a common chain by their first divergence.

    An inverse continuation sits below the common prefix and a direct continuation above it.

    Raises:
        SideMismatchError: If the words are not in a common chain
    """
    if w1.anchor != w2.anchor or side_of(A, H, w1) != side_of(A, H, w2):
        raise SideMismatchError(f"{w1.text} and {w2.text} are not in a common chain")
    horizon = _horizon(w1, w2)
    c = 0
    while c < horizon:
        a, b = w1.letter_at(c), w2.letter_at(c)
        if a is None or b is None or a != b:
            break
        c += 1
    if c == horizon:
        return Order.EQ
    a, b = w1.letter_at(c), w2.letter_at(c)
    if a is None and b is None:
        return Order.EQ
    if a is None:
        return Order.LT if b.direct else Order.GT
    if b is None:
        return Order.GT if a.direct else Order.LT
    if a.inverse and b.direct:
        return Order.LT
    if a.direct and b.inverse:
        return Order.GT
    raise ConsistencyError(f"{w1.text} and {w2.text} diverge on letters of the same kind")


def classify_one_sided(w: OneSidedWord) -> OneSidedShape:
    """Split a canonical one-sided word into ``stem letter period^inf`` and tag its shape."""
    if not w.prefix_letters:
        return OneSidedShape("periodic", (), None, w.period)
    kind = "expanding" if w.period[-1].inverse else "contracting"
    return OneSidedShape(kind, w.prefix_letters[:-1], w.prefix_letters[-1], w.period)


# extensions and enumeration


def extension(A: AlgebraPresentation, H: HPartition, w: FiniteWord, inverse: bool) -> Optional[Letter]:
    """The unique direct (or inverse) letter that extends ``w`` on the right, if any."""
    if w.is_empty:
        candidates = [l for l in H.letters_in(w.anchor, w.sign) if l.inverse == inverse]
    else:
        candidates = [l for l in entering_letters(A, w.end)
                      if l.inverse == inverse and can_append(A, w.letters, l)]
    if len(candidates) > 1:
        raise ConsistencyError(f"{w.text} has several {'inverse' if inverse else 'direct'} extensions")
    return candidates[0] if candidates else None


def inverse_closure(A: AlgebraPresentation, H: HPartition, w: FiniteWord) -> FiniteWord:
    """``w`` followed by its maximal run of inverse extensions."""
    cap = len(A.arrows) * _window(A) + 2
    for _ in range(cap):
        letter = extension(A, H, w, inverse=True)
        if letter is None:
            return w
        w = append(A, w, letter)
    raise ConsistencyError(f"Inverse extension of {w.text} does not terminate; is the algebra finite dimensional?")


def enumerate_words(A: AlgebraPresentation, max_len: int, anchor: Optional[str] = None) -> List[FiniteWord]:
    """All valid finite words of length at most ``max_len``, trivial words included."""
    vertices = [anchor] if anchor is not None else list(A.vertices)
    words: List[FiniteWord] = []
    for vertex in vertices:
        words.append(FiniteWord(vertex, (), vertex, 1))
        words.append(FiniteWord(vertex, (), vertex, -1))
    stack = [(l,) for vertex in vertices for l in reversed(entering_letters(A, vertex))]
    while stack:
        letters = stack.pop()
        words.append(FiniteWord(letters[0].left(A), letters, letters[-1].right(A), 0))
        if len(letters) < max_len:
            for letter in reversed(entering_letters(A, letters[-1].right(A))):
                if can_append(A, letters, letter):
                    stack.append(letters + (letter,))
    return words
