"""Ringel's list descriptors, truncations and pp-type questions for two-sided words."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, List, Optional, Sequence, Tuple, Union

from .bands import Band, band_family
from .errors import InvalidWordError, PreconditionError, SideMismatchError
from .homs import pointed_morphism_exists
from .linalg import ExactField
from .presentation import AlgebraPresentation
from .repmod import (FDModule, FormulaSum, PPWordFormula, PointedElement, both_div, free_realization, node_words,
                     pp_subspace, string_module)
from .words import (FiniteWord, HPartition, Letter, OneSidedWord, Order, TwoSidedWord, Word, classify_one_sided,
                    compare, concat, enumerate_words, invert, is_valid_letters, make_one_sided,
                    primitive_root, side_of)

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    IN_TYPE = "InType"
    NOT_IN_TYPE = "NotInType"


def _flip(letters: Sequence[Letter]) -> Tuple[Letter, ...]:
    return tuple(l.inverted() for l in reversed(letters))


def _tokens(letters: Sequence[Letter]) -> str:
    return " ".join(l.token for l in letters)


@dataclass(frozen=True)
class BiperiodicWord:
    """``^inf(E) middle (F)^inf`` read left to right, without a marked position."""

    left_period: Tuple[Letter, ...]
    middle: Tuple[Letter, ...]
    right_period: Tuple[Letter, ...]

    @property
    def key(self) -> Tuple:
        return (self.left_period, self.middle, self.right_period)

    @property
    def text(self) -> str:
        right = " ".join(filter(None, [_tokens(self.middle), f"({_tokens(self.right_period)})^inf"]))
        return f"inf^({_tokens(self.left_period)}) . {right}"

    @property
    def periodic(self) -> bool:
        E, F = self.left_period, self.right_period
        if len(E) != len(F):
            return False
        sample = E * 2 + self.middle + F * 2
        return all(sample[i] == sample[i + len(E)] for i in range(len(sample) - len(E)))

    def inverted(self) -> "BiperiodicWord":
        return BiperiodicWord(_flip(self.right_period), _flip(self.middle), _flip(self.left_period))


@dataclass(frozen=True)
class RingelDescriptor:
    """One entry of Ringel's list.

    ``variant`` is one of finite, one_sided, biperiodic, prufer, adic, generic.
    """

    variant: str
    text: str
    shapes: Tuple[str, ...] = ()
    band: Optional[Band] = None
    parameter: Optional[str] = None
    word: Any = None


@dataclass(frozen=True)
class Truncation:
    word: FiniteWord
    node: int


@dataclass
class BasicOpen:
    phi: PPWordFormula
    psi: FormulaSum
    left: FiniteWord
    right: FiniteWord
    left_short: FiniteWord
    right_short: FiniteWord


@dataclass
class Classification:
    verdict: Verdict
    components: List[Any] = field(default_factory=list)
    discarded: List[Any] = field(default_factory=list)
    deciding: Optional[Any] = None


@dataclass
class OracleResult:
    verdict: Verdict
    levels: List[int]
    answers: List[bool]
    stable: bool


def canonical_biperiodic(w: BiperiodicWord) -> BiperiodicWord:
    """Shortest middle: absorb letters into the periods, then align the periods if the middle is empty."""
    E, m, F = primitive_root(w.left_period), list(w.middle), primitive_root(w.right_period)
    while m and m[0] == E[0]:
        m.pop(0)
        E = E[1:] + E[:1]
    while m and m[-1] == F[-1]:
        m.pop()
        F = F[-1:] + F[:-1]
    if not m:
        for _ in range(len(E) * len(F)):
            if E[-1] != F[-1]:
                break
            E = E[-1:] + E[:-1]
            F = F[-1:] + F[:-1]
    return BiperiodicWord(tuple(E), tuple(m), tuple(F))


def end_shapes(A: AlgebraPresentation, w: BiperiodicWord) -> Tuple[str, str]:
    """``(left shape, right shape)``; the left end is classified after flipping the word over.

    Raises:
        PreconditionError: If the word is periodic
    """
    if w.periodic:
        raise PreconditionError(f"{w.text} is periodic; it describes a band, not a biperiodic string")
    right = make_one_sided(A, w.left_period + w.middle, w.right_period)
    left = make_one_sided(A, _flip(w.right_period) + _flip(w.middle), _flip(w.left_period))
    return classify_one_sided(left).kind, classify_one_sided(right).kind


def _finite(A: AlgebraPresentation, anchor: str, letters: Tuple[Letter, ...], sign: int) -> FiniteWord:
    if not letters:
        return FiniteWord(anchor, (), anchor, sign)
    return FiniteWord(anchor, letters, letters[-1].right(A), 0)


def _power(w: Word, n: int) -> Tuple[Letter, ...]:
    if w.is_infinite:
        return w.prefix_letters + w.period * n
    return w.letters


def pointed_truncation(A: AlgebraPresentation, q: TwoSidedWord, n: int) -> Truncation:
    """The level ``n`` truncation of a two-sided word with the node of its anchor.

    Raises:
        PreconditionError: If n is negative
    """
    if n < 0:
        raise PreconditionError("Truncation level must be nonnegative")
    u = _finite(A, q.anchor, _power(q.left, n), -1)
    v = _finite(A, q.anchor, _power(q.right, n), 1)
    return Truncation(concat(A, invert(u), v), len(u))


def truncate(A: AlgebraPresentation, w: Union[OneSidedWord, TwoSidedWord], n: int) -> FiniteWord:
    """Replace every infinite tail ``prefix D^inf`` by ``prefix D^n``.

    Raises:
        PreconditionError: If n is negative
    """
    if isinstance(w, OneSidedWord):
        if n < 0:
            raise PreconditionError("Truncation level must be nonnegative")
        return _finite(A, w.anchor, _power(w, n), 1)
    return pointed_truncation(A, w, n).word


class RingelAnalyzer:
    """Handler for Ringel's list and pp-type questions over a domestic string algebra."""

    def __init__(self,
                 algebra: AlgebraPresentation,
                 partition: HPartition,
                 field: Optional[ExactField] = None,
                 stabilization_window: int = 3,
                 max_levels: int = 8):
        """Initialize the analyzer.
        Args:
            algebra: Validated presentation
            partition: H-partition every comparison is made in
            field: Coefficient field of truncated modules (rationals by default)
            stabilization_window: Number of consecutive agreeing truncation levels the oracle waits for
            max_levels: Number of truncation levels the oracle tries before giving up
        """
        self.algebra = algebra
        self.partition = partition
        self.field = field or ExactField()
        self.stabilization_window = stabilization_window
        self.max_levels = max_levels

    # list

    def _periods(self, bands: Sequence[Band]) -> List[Tuple[Letter, ...]]:
        return sorted({rotation for band in bands for rotation in band.rotations()})

    def _finite_entries(self, bound: int) -> List[RingelDescriptor]:
        entries, seen = [], set()
        for w in enumerate_words(self.algebra, bound):
            if w.is_empty:
                if w.sign < 0:
                    continue
                key = (w.anchor,)
            else:
                key = min(w.letters, _flip(w.letters))
            if key in seen:
                continue
            seen.add(key)
            entries.append(RingelDescriptor("finite", w.text, word=w))
        return entries

    def _one_sided_entries(self, periods, bound: int) -> List[RingelDescriptor]:
        A = self.algebra
        found = {}
        prefixes = [w for w in enumerate_words(A, bound) if not (w.is_empty and w.sign < 0)]
        for period in periods:
            start = period[0].left(A)
            for p in prefixes:
                if p.end != start:
                    continue
                try:
                    w = make_one_sided(A, p.letters, period, p.anchor)
                except InvalidWordError:
                    continue
                found.setdefault((w.anchor, w.key), w)
        return [RingelDescriptor("one_sided", w.text, (classify_one_sided(w).kind,), word=w)
                for _, w in sorted(found.items(), key=lambda item: item[1].text)]

    def _biperiodic_entries(self, periods, bound: int) -> List[RingelDescriptor]:
        A = self.algebra
        middles = [()] + sorted({w.letters for w in enumerate_words(A, bound) if w.letters})
        found = {}
        window = max(2, A.max_relation_length)
        for E in periods:
            for F in periods:
                for m in middles:
                    reach = max(2, -(-window // min(len(E), len(F))) + 1)
                    if not is_valid_letters(A, E * reach + m + F * reach):
                        continue
                    w = canonical_biperiodic(BiperiodicWord(E, m, F))
                    if w.periodic:
                        continue
                    flipped = canonical_biperiodic(w.inverted())
                    representative = min(w, flipped, key=lambda x: x.key)
                    found.setdefault(representative.key, representative)
        entries = []
        for w in sorted(found.values(), key=lambda x: x.text):
            entries.append(RingelDescriptor("biperiodic", w.text, end_shapes(A, w), word=w))
        return entries

    def enumerate_ringel_list(self,
                              prefix_bound: int = 2,
                              middle_bound: int = 2,
                              lambda_samples: Sequence[int] = (1, 2)) -> List[RingelDescriptor]:
        """Descriptors of Ringel's list up to the given bounds.

        Args:
            prefix_bound: Longest finite string and longest one-sided prefix
            middle_bound: Longest middle part of a biperiodic string
            lambda_samples: Integers turned into the sampled band parameters
        Returns:
            Finite, one-sided and biperiodic strings followed by the Prufer, adic and generic band entries
        Raises:
            NonDomesticError: On non-domestic input
        """
        bands = band_family(self.algebra)
        periods = self._periods(bands)
        entries = self._finite_entries(prefix_bound)
        entries += self._one_sided_entries(periods, prefix_bound)
        entries += self._biperiodic_entries(periods, middle_bound)
        parameters = self.field.lambda_values(lambda_samples)
        for band in bands:
            for value in parameters:
                text = self.field.format(value)
                entries.append(RingelDescriptor("prufer", f"Prufer({band.text}, {text})", band=band, parameter=text))
                entries.append(RingelDescriptor("adic", f"Adic({band.text}, {text})", band=band, parameter=text))
            entries.append(RingelDescriptor("generic", f"Generic({band.text})", band=band))
        logger.info("Ringel list of %s: %d descriptors", self.algebra.name, len(entries))
        return entries

    # pp-types

    def _check_sides(self, q: TwoSidedWord, C: FiniteWord, D: FiniteWord) -> None:
        A, H = self.algebra, self.partition
        if C.anchor != q.anchor or D.anchor != q.anchor:
            raise SideMismatchError(f"Formula words must start at {q.anchor}")
        if side_of(A, H, C) != -1 or side_of(A, H, D) != 1:
            raise SideMismatchError(f"Need {C.text} in H_-1 and {D.text} in H_1 at {q.anchor}")

    def pp_member(self, q: TwoSidedWord, C: FiniteWord, D: FiniteWord) -> Verdict:
        """Whether ``(C^-1.D)`` lies in the pp-type of the canonical element of M_w.

        Raises:
            SideMismatchError: If C or D sit on the wrong side of the anchor
        """
        self._check_sides(q, C, D)
        A, H = self.algebra, self.partition
        if compare(A, H, C, q.left) <= Order.EQ and compare(A, H, D, q.right) <= Order.EQ:
            return Verdict.IN_TYPE
        return Verdict.NOT_IN_TYPE

    @staticmethod
    def _band_rotation(period: Tuple[Letter, ...], from_right: bool = False) -> int:
        """Least shift turning the period into a band form, rotating leftwards or rightwards."""
        n = len(period)
        for j in range(n):
            cut = n - j if from_right else j
            rotated = period[cut:] + period[:cut]
            if rotated[0].direct and rotated[-1].inverse:
                return j
        raise PreconditionError(f"Period {_tokens(period)} has no band form")

    def ziegler_basic_open(self, q: TwoSidedWord) -> BasicOpen:
        """The pair ``phi = (C^-1.D)`` and ``psi = (C'^-1.D) + (C^-1.D')`` isolating M_w.

        ``C^-1`` is the left end read up to one full band, D likewise on the right; C' and D'
        drop the outermost letter.

        Raises:
            PreconditionError: If w is periodic or has a finite end
        """
        A, H = self.algebra, self.partition
        u, v = q.left, q.right
        if not (u.is_infinite and v.is_infinite):
            raise PreconditionError("Basic opens are built for words infinite on both sides")
        if q.periodic:
            raise PreconditionError(f"{q.text} is periodic")

        Q, P = _flip(u.period), _flip(u.prefix_letters)
        j = self._band_rotation(Q, from_right=True)
        E = Q[len(Q) - j:] + Q[:len(Q) - j]
        left_inverse = E + Q[len(Q) - j:] + P
        C = _finite(A, q.anchor, _flip(left_inverse), -1)

        period, prefix = v.period, v.prefix_letters
        t = self._band_rotation(period)
        F = period[t:] + period[:t]
        D = _finite(A, q.anchor, prefix + period[:t] + F, 1)

        C_short = _finite(A, q.anchor, C.letters[:-1], -1)
        D_short = _finite(A, q.anchor, D.letters[:-1], 1)
        phi = both_div(A, H, C, D)
        psi = FormulaSum([both_div(A, H, C_short, D), both_div(A, H, C, D_short)])
        return BasicOpen(phi, psi, C, D, C_short, D_short)

    def basic_open(self, q: TwoSidedWord, C: FiniteWord, D: FiniteWord, E: FiniteWord, F: FiniteWord) -> BasicOpen:
        """The pair ``(C^-1.D)`` / ``(E^-1.D) + (C^-1.F)`` for C <= u < E and D <= v < F.

        Raises:
            PreconditionError: If the words are not placed around u and v as required
        """
        A, H = self.algebra, self.partition
        self._check_sides(q, C, D)
        self._check_sides(q, E, F)
        if not (compare(A, H, C, q.left) <= Order.EQ and compare(A, H, q.left, E) == Order.LT):
            raise PreconditionError(f"Need {C.text} <= u < {E.text}")
        if not (compare(A, H, D, q.right) <= Order.EQ and compare(A, H, q.right, F) == Order.LT):
            raise PreconditionError(f"Need {D.text} <= v < {F.text}")
        phi = both_div(A, H, C, D)
        psi = FormulaSum([both_div(A, H, E, D), both_div(A, H, C, F)])
        return BasicOpen(phi, psi, C, D, E, F)

    def classify_formula(self, q: TwoSidedWord, L: FDModule, l: PointedElement,
                         basic: Optional[BasicOpen] = None) -> Classification:
        """Decide whether the formula freely realized by ``(L, l)`` lies in the pp-type of M_w.

        Band modules below phi always satisfy psi. For a string module, components satisfying
        psi are discarded. A single remaining component (G^-1.H) is in the type iff G <= u and
        H <= v. Two remaining components l = l1 + l2 of opposite orientation reduce to the one
        whose words fit under u and v; the other implies a term of psi. The sum is therefore in
        the type iff some remaining component passes the single-component rule.

        Raises:
            PreconditionError: If l does not satisfy phi, or L is neither a string nor a band module
        """
        A, H = self.algebra, self.partition
        basic = basic or self.ziegler_basic_open(q)
        if l.vertex != q.anchor:
            raise SideMismatchError(f"Element at {l.vertex}, word anchored at {q.anchor}")
        if not pp_subspace(L, H, basic.phi).contains(l.vector):
            raise PreconditionError("The pointed module does not satisfy phi")
        if L.kind == "band":
            return Classification(Verdict.NOT_IN_TYPE)
        if L.kind != "string":
            raise PreconditionError("Classification needs a pointed string or band module")

        psi_space = pp_subspace(L, H, basic.psi)
        result = Classification(Verdict.NOT_IN_TYPE)
        K = L.field
        for index, coefficient in enumerate(l.vector):
            if K.is_zero(coefficient):
                continue
            node = L.labels[l.vertex][index]
            result.components.append(node)
            if psi_space.contains(K.unit_vector(len(l.vector), index)):
                result.discarded.append(node)
                continue
            G, Hw = node_words(L, H, node)
            if compare(A, H, G, q.left) <= Order.EQ and compare(A, H, Hw, q.right) <= Order.EQ:
                if result.deciding is None:
                    result.deciding = node
                result.verdict = Verdict.IN_TYPE
        return result

    # truncation oracle

    def _lower_cut(self, w: Word, n: int) -> Tuple[Letter, ...]:
        """A prefix of w at least ``prefix D^n`` long after which w continues with a direct letter."""
        if not w.is_infinite:
            return w.letters
        length = len(w.prefix_letters) + n * len(w.period)
        while w.letter_at(length).inverse:
            length += 1
        return w.first_letters(length)

    def oracle_truncation(self, q: TwoSidedWord, n: int) -> Truncation:
        A = self.algebra
        u = _finite(A, q.anchor, self._lower_cut(q.left, n), -1)
        v = _finite(A, q.anchor, self._lower_cut(q.right, n), 1)
        return Truncation(concat(A, invert(u), v), len(u))

    def start_level(self, q: TwoSidedWord) -> int:
        periods = [len(w.period) for w in (q.left, q.right) if w.is_infinite]
        if not periods:
            return 1
        middle = sum(len(w.prefix_letters) if w.is_infinite else len(w) for w in (q.left, q.right))
        return math.ceil((middle + max(periods)) / min(periods)) + 1

    def truncation_oracle(self, q: TwoSidedWord, L: FDModule, l: PointedElement) -> OracleResult:
        """Ask whether ``(L, l)`` maps onto the anchor of growing truncations of w.

        Stops once the last ``stabilization_window`` levels agree.
        """
        start = self.start_level(q)
        levels, answers = [], []
        for n in range(start, start + self.max_levels):
            cut = self.oracle_truncation(q, n)
            M = string_module(self.algebra, cut.word, self.field)
            answers.append(pointed_morphism_exists(L, l, M, M.element(cut.node)).exists)
            levels.append(n)
            recent = answers[-self.stabilization_window:]
            if len(recent) == self.stabilization_window and len(set(recent)) == 1:
                verdict = Verdict.IN_TYPE if recent[0] else Verdict.NOT_IN_TYPE
                return OracleResult(verdict, levels, answers, True)
        logger.warning("Warning: truncation verdicts did not settle after %d levels: %s", self.max_levels, answers)
        return OracleResult(Verdict.IN_TYPE if answers[-1] else Verdict.NOT_IN_TYPE, levels, answers, False)

    def word_oracle(self, q: TwoSidedWord, C: FiniteWord, D: FiniteWord) -> OracleResult:
        """The truncation oracle applied to the free realization of ``(C^-1.D)``."""
        self._check_sides(q, C, D)
        A, H = self.algebra, self.partition
        L, l = free_realization(A, H, both_div(A, H, C, D), self.field)
        return self.truncation_oracle(q, L, l)


def string_diagram_dot(A: AlgebraPresentation, w: FiniteWord, marked: Optional[int] = None, name: str = "string") -> str:
    """DOT drawing of M(w): direct letters run from upper right to lower left, inverse letters
    from upper left to lower right."""
    heights = [0]
    for letter in w.letters:
        heights.append(heights[-1] + (1 if letter.direct else -1))
    lines = [f"digraph {name} {{", "  node [shape=circle, label=\"\"];"]
    for node, height in enumerate(heights):
        shape = ", shape=doublecircle" if node == marked else ""
        lines.append(f'  x{node} [pos="{node},{height}!"{shape}];')
    for i, letter in enumerate(w.letters, start=1):
        if letter.direct:
            lines.append(f'  x{i} -> x{i - 1} [label="{letter.arrow}"];')
        else:
            lines.append(f'  x{i - 1} -> x{i} [label="{letter.arrow}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
