"""Finite-dimensional representations: string and band modules, pp subspaces, words of elements."""

import logging
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix

from .bands import Band
from .errors import ConsistencyError, PreconditionError, SideMismatchError, StringAlgebraError
from .linalg import ExactField, Subspace, Vector
from .presentation import AlgebraPresentation
from .words import (FiniteWord, HPartition, Letter, OneSidedWord, Order, TwoSidedWord, Word, append,
                    compare, concat, enumerate_words, extension, inverse_closure, invert, make_one_sided,
                    side_of)

logger = logging.getLogger(__name__)


@dataclass
class FDModule:
    """A representation: a vector space per vertex and a matrix per arrow.

    ``labels[S]`` names the coordinates of ``e_S M``. String modules label coordinates by
    word node, band modules by ``(node, layer)``, direct sums by ``(summand, label)``.
    """

    algebra: AlgebraPresentation
    field: ExactField
    dims: Dict[str, int]
    matrices: Dict[str, DomainMatrix]
    labels: Dict[str, List[Any]]
    kind: str = "generic"
    word: Optional[FiniteWord] = None
    band: Optional[Band] = None
    parameter: Any = None
    layers: int = 0
    summands: Tuple["FDModule", ...] = ()

    @property
    def dim(self) -> int:
        return sum(self.dims.values())

    def matrix(self, arrow: str) -> DomainMatrix:
        return self.matrices[arrow]

    def act(self, arrow: str, v: Sequence) -> Vector:
        return self.field.apply(self.matrices[arrow], v)

    def relations_vanish(self) -> bool:
        for relation in self.algebra.relations:
            product = self.matrices[relation[-1]]
            for arrow in reversed(relation[:-1]):
                product = self.field.matmul(self.matrices[arrow], product)
            if any(not self.field.is_zero_vector(row) for row in self.field.rows_of(product)):
                return False
        return True

    def position(self, node: Any) -> Tuple[str, int]:
        """Vertex and coordinate index of a basis label."""
        for vertex, labels in self.labels.items():
            if node in labels:
                return vertex, labels.index(node)
        raise PreconditionError(f"No basis element labelled {node!r}")

    def element(self, node: Any) -> "PointedElement":
        vertex, index = self.position(node)
        return PointedElement(self, vertex, self.field.unit_vector(self.dims[vertex], index))

    def to_json(self) -> Dict[str, Any]:
        return {
            "field": self.field.name,
            "dims": dict(self.dims),
            "matrices": {arrow: [[self.field.format(x) for x in row] for row in self.field.rows_of(mat)]
                         for arrow, mat in self.matrices.items()},
        }


@dataclass
class PointedElement:
    module: FDModule
    vertex: str
    vector: Vector

    def __post_init__(self):
        self.vector = tuple(self.vector)
        if len(self.vector) != self.module.dims[self.vertex]:
            raise PreconditionError(f"Vector of length {len(self.vector)} does not fit e_{self.vertex} M")

    @property
    def is_zero(self) -> bool:
        return self.module.field.is_zero_vector(self.vector)

    def __add__(self, other: "PointedElement") -> "PointedElement":
        if other.module is not self.module or other.vertex != self.vertex:
            raise SideMismatchError("Elements live in different spaces")
        return PointedElement(self.module, self.vertex, self.module.field.add(self.vector, other.vector))

    def __sub__(self, other: "PointedElement") -> "PointedElement":
        if other.module is not self.module or other.vertex != self.vertex:
            raise SideMismatchError("Elements live in different spaces")
        return PointedElement(self.module, self.vertex, self.module.field.sub(self.vector, other.vector))

    def scaled(self, c) -> "PointedElement":
        return PointedElement(self.module, self.vertex, self.module.field.scale(c, self.vector))


@dataclass(frozen=True)
class PPWordFormula:
    """``(C^-1.D)`` and its one-sided halves ``(.D)`` and ``(C^-1.)``."""

    kind: str
    vertex: str
    left: Optional[FiniteWord] = None
    right: Optional[FiniteWord] = None

    @property
    def text(self) -> str:
        left = "" if self.left is None or self.left.is_empty else invert(self.left).text
        right = "" if self.right is None or self.right.is_empty else self.right.text
        return f"({left}.{right})"


@dataclass
class FormulaSum:
    """A finite sum of word formulas at one vertex."""

    terms: List[PPWordFormula] = field(default_factory=list)

    @property
    def text(self) -> str:
        return " + ".join(term.text for term in self.terms)


@dataclass
class HomogeneityResult:
    homogeneous: bool
    word: TwoSidedWord
    witness: Optional[Vector] = None


@dataclass
class DivisionResult:
    element: PointedElement
    word: TwoSidedWord
    homogeneous: bool


# construction


def _empty_module(A: AlgebraPresentation, K: ExactField, labels: Dict[str, List[Any]]) -> Dict[str, Any]:
    dims = {vertex: len(labels.get(vertex, [])) for vertex in A.vertices}
    rows = {a.name: [[K.zero] * dims[a.source] for _ in range(dims[a.target])] for a in A.arrows}
    return {"dims": dims, "rows": rows, "labels": {vertex: list(labels.get(vertex, [])) for vertex in A.vertices}}


def _finish(A: AlgebraPresentation, K: ExactField, parts: Dict[str, Any], **extra) -> FDModule:
    dims = parts["dims"]
    matrices = {a.name: K.matrix(parts["rows"][a.name], dims[a.target], dims[a.source]) for a in A.arrows}
    return FDModule(A, K, dims, matrices, parts["labels"], **extra)


def string_module(A: AlgebraPresentation, w: FiniteWord, K: Optional[ExactField] = None) -> FDModule:
    """The string module M(w) with basis nodes ``0..len(w)``.

    A direct letter at position i sends node i to node i-1; an inverse letter sends node
    i-1 to node i.
    """
    K = K or ExactField()
    vertices = [w.anchor] + [letter.right(A) for letter in w.letters]
    labels: Dict[str, List[Any]] = {}
    for node, vertex in enumerate(vertices):
        labels.setdefault(vertex, []).append(node)
    parts = _empty_module(A, K, labels)
    local = {node: parts["labels"][vertex].index(node) for node, vertex in enumerate(vertices)}
    for i, letter in enumerate(w.letters, start=1):
        rows = parts["rows"][letter.arrow]
        if letter.direct:
            rows[local[i - 1]][local[i]] = K.one
        else:
            rows[local[i]][local[i - 1]] = K.one
    return _finish(A, K, parts, kind="string", word=w)


def band_module(A: AlgebraPresentation,
                C: Band,
                parameter,
                layers: int,
                K: Optional[ExactField] = None,
                allow_degenerate: bool = False) -> FDModule:
    """The band module M(C, parameter, layers).

    Every node carries ``K^layers``. All letters act as identities except the closing
    letter, which acts by the Jordan block with eigenvalue ``parameter``.

    Raises:
        PreconditionError: If the parameter is zero (unless ``allow_degenerate``) or layers < 1
    """
    K = K or ExactField()
    if layers < 1:
        raise PreconditionError("Band modules need at least one layer")
    if K.is_zero(parameter):
        if not allow_degenerate:
            raise PreconditionError("Band parameter must be nonzero; the zero case is a string module")
        letters = (C.letters * layers)[:-1]
        return string_module(A, FiniteWord(letters[0].left(A), letters, letters[-1].right(A), 0), K)

    n = len(C.letters)
    vertices = [C.letters[0].left(A)] + [letter.right(A) for letter in C.letters[:-1]]
    labels: Dict[str, List[Any]] = {}
    for node, vertex in enumerate(vertices):
        labels.setdefault(vertex, []).extend((node, layer) for layer in range(1, layers + 1))
    parts = _empty_module(A, K, labels)
    local = {label: parts["labels"][vertex].index(label) for vertex in labels for label in labels[vertex]}

    for i, letter in enumerate(C.letters, start=1):
        left_node, right_node = i - 1, i % n
        rows = parts["rows"][letter.arrow]
        closing = i == n
        for layer in range(1, layers + 1):
            if letter.direct:
                target, source = (left_node, layer), (right_node, layer)
            else:
                target, source = (right_node, layer), (left_node, layer)
            rows[local[target]][local[source]] = parameter if closing else K.one
            if closing and layer > 1:
                rows[local[(target[0], layer - 1)]][local[source]] = K.one
    return _finish(A, K, parts, kind="band", band=C, parameter=parameter, layers=layers)


def direct_sum(M: FDModule, N: FDModule) -> FDModule:
    if M.algebra.name != N.algebra.name or M.field != N.field:
        raise PreconditionError("Direct sums need modules over the same algebra and field")
    A, K = M.algebra, M.field
    labels = {vertex: [(0, l) for l in M.labels[vertex]] + [(1, l) for l in N.labels[vertex]] for vertex in A.vertices}
    parts = _empty_module(A, K, labels)
    for a in A.arrows:
        rows = parts["rows"][a.name]
        for i, row in enumerate(K.rows_of(M.matrix(a.name))):
            for j, x in enumerate(row):
                rows[i][j] = x
        ti, sj = M.dims[a.target], M.dims[a.source]
        for i, row in enumerate(K.rows_of(N.matrix(a.name))):
            for j, x in enumerate(row):
                rows[ti + i][sj + j] = x
    return _finish(A, K, parts, kind="sum", summands=(M, N))


def include(total: FDModule, summand: int, element: PointedElement) -> PointedElement:
    """The image of an element of one summand of a direct sum."""
    first, second = total.summands
    vertex = element.vertex
    if summand == 0:
        vector = tuple(element.vector) + first.field.zero_vector(second.dims[vertex])
    else:
        vector = first.field.zero_vector(first.dims[vertex]) + tuple(element.vector)
    return PointedElement(total, vertex, vector)


def _maximal_path(A: AlgebraPresentation, first: str) -> Tuple[str, ...]:
    """The longest nonzero path starting with ``first``, in written order."""
    path = (first,)
    for _ in range(len(A.arrows) * max(2, A.max_relation_length) + 1):
        following = [a.name for a in A.outgoing(A.arrow(path[0]).target)
                     if not A.contains_relation((a.name,) + path)]
        if not following:
            return path
        path = (following[0],) + path
    raise ConsistencyError(f"Path from {first} does not terminate")


def projective_module(A: AlgebraPresentation, vertex: str, K: Optional[ExactField] = None) -> Tuple[FDModule, PointedElement]:
    """``A e_S`` as a string module, pointed at the idempotent ``e_S``."""
    outgoing = sorted(a.name for a in A.outgoing(vertex))
    left = _maximal_path(A, outgoing[0]) if outgoing else ()
    right = _maximal_path(A, outgoing[1]) if len(outgoing) > 1 else ()
    letters = tuple(Letter(name) for name in left) + tuple(Letter(name, True) for name in reversed(right))
    if letters:
        w = FiniteWord(letters[0].left(A), letters, letters[-1].right(A), 0)
    else:
        w = FiniteWord(vertex, (), vertex, 1)
    M = string_module(A, w, K)
    return M, M.element(len(left))


# pp subspaces


def _kernel(M: FDModule, arrow: str) -> Subspace:
    a = M.algebra.arrow(arrow)
    return Subspace.zero(M.field, M.dims[a.target]).preimage(M.matrix(arrow))


def _closing_space(M: FDModule, H: HPartition, w: FiniteWord) -> Subspace:
    closing = extension(M.algebra, H, w, inverse=True)
    if closing is None:
        return Subspace.full(M.field, M.dims[w.end])
    return _kernel(M, closing.arrow)


def divisibility_subspace(M: FDModule, H: HPartition, w: FiniteWord) -> Subspace:
    """``w`` applied to the closing kernel, reading letters right to left.

    A direct letter takes images, an inverse letter takes preimages.
    """
    N = _closing_space(M, H, w)
    for letter in reversed(w.letters):
        if letter.direct:
            N = N.image(M.matrix(letter.arrow))
        else:
            N = N.preimage(M.matrix(letter.arrow))
    return N


def right_div(A: AlgebraPresentation, H: HPartition, D: FiniteWord) -> PPWordFormula:
    if side_of(A, H, D) != 1:
        raise SideMismatchError(f"{D.text} is not in H_1({D.anchor})")
    return PPWordFormula("right", D.anchor, None, D)


def left_div(A: AlgebraPresentation, H: HPartition, C: FiniteWord) -> PPWordFormula:
    if side_of(A, H, C) != -1:
        raise SideMismatchError(f"{C.text} is not in H_-1({C.anchor})")
    return PPWordFormula("left", C.anchor, C, None)


def both_div(A: AlgebraPresentation, H: HPartition, C: FiniteWord, D: FiniteWord) -> PPWordFormula:
    if C.anchor != D.anchor:
        raise SideMismatchError(f"{C.text} and {D.text} start at different vertices")
    left_div(A, H, C)
    right_div(A, H, D)
    return PPWordFormula("both", C.anchor, C, D)


def pp_subspace(M: FDModule, H: HPartition, formula) -> Subspace:
    """The solution set of a word formula (or a sum of them) in ``e_S M``."""
    if isinstance(formula, FormulaSum):
        vertex = formula.terms[0].vertex
        total = Subspace.zero(M.field, M.dims[vertex])
        for term in formula.terms:
            total = total + pp_subspace(M, H, term)
        return total
    space = Subspace.full(M.field, M.dims[formula.vertex])
    if formula.left is not None:
        space = space & divisibility_subspace(M, H, formula.left)
    if formula.right is not None:
        space = space & divisibility_subspace(M, H, formula.right)
    return space


def satisfies(M: FDModule, H: HPartition, m: PointedElement, formula) -> bool:
    vertex = formula.terms[0].vertex if isinstance(formula, FormulaSum) else formula.vertex
    if vertex != m.vertex:
        raise SideMismatchError(f"Formula at {vertex} evaluated at an element of e_{m.vertex} M")
    return pp_subspace(M, H, formula).contains(m.vector)


# words of elements


def _lift(K: ExactField, mat: DomainMatrix) -> DomainMatrix:
    m, n = mat.shape
    rows = [[K.one] + [K.zero] * n]
    rows += [[K.zero] + list(row) for row in K.rows_of(mat)]
    return K.matrix(rows, m + 1, n + 1)


class _Tracker:
    """Pairs ``(t, n)`` with ``t m`` related to ``n`` along the letters read so far."""

    def __init__(self, M: FDModule, vertex: str, space: Subspace):
        self.M = M
        self.vertex = vertex
        self.space = space

    @classmethod
    def start(cls, m: PointedElement) -> "_Tracker":
        K = m.module.field
        return cls(m.module, m.vertex, Subspace.span(K, 1 + len(m.vector), [(K.one,) + tuple(m.vector)]))

    def advance(self, letter: Letter) -> "_Tracker":
        A, K = self.M.algebra, self.M.field
        lifted = _lift(K, self.M.matrix(letter.arrow))
        if letter.direct:
            return _Tracker(self.M, letter.right(A), self.space.preimage(lifted))
        return _Tracker(self.M, letter.right(A), self.space.image(lifted))

    def holds(self, target: Subspace) -> bool:
        K = self.M.field
        box = Subspace.span(K, self.space.ambient,
                            [K.unit_vector(self.space.ambient, 0)] + [(K.zero,) + tuple(b) for b in target.basis])
        return any(not K.is_zero(b[0]) for b in (self.space & box).basis)

    def key(self) -> Tuple:
        K = self.M.field
        top = any(not K.is_zero(b[0]) for b in self.space.basis)
        rest = [b[1:] for b in self.space.basis if K.is_zero(b[0])]
        every = [b[1:] for b in self.space.basis]
        return (top, tuple(K.rref_rows(rest, self.space.ambient - 1)), tuple(K.rref_rows(every, self.space.ambient - 1)))


def _holds(H: HPartition, word: FiniteWord, tracker: _Tracker) -> bool:
    return tracker.holds(_closing_space(tracker.M, H, word))


def _eventual_period(A: AlgebraPresentation, letters: Tuple[Letter, ...], anchor: str) -> Optional[OneSidedWord]:
    n = len(letters)
    for p in range(1, n // 3 + 1):
        if all(letters[i] == letters[i + p] for i in range(n - 3 * p, n - p)):
            start = n - 3 * p
            while start > 0 and letters[start - 1] == letters[start - 1 + p]:
                start -= 1
            return make_one_sided(A, letters[:start], letters[start:start + p], anchor)
    return None


def _sup_word(M: FDModule, H: HPartition, m: PointedElement, sign: int) -> Word:
    """The supremum of the words of one chain whose divisibility formula holds at ``m``."""
    A = M.algebra
    if m.is_zero:
        raise PreconditionError("Words are only defined for nonzero elements")
    window = max(2, A.max_relation_length)
    cap = 2 * (M.dim + 1) * (2 * len(A.arrows) + 1) + 4 * window
    x = FiniteWord(m.vertex, (), m.vertex, sign)
    tracker = _Tracker.start(m)
    seen: Dict[Tuple, int] = {}
    while len(x) <= cap:
        if x.letters:
            key = (x.letters[-window:],) + tracker.key()
            if key in seen:
                start = seen[key]
                return make_one_sided(A, x.letters[:start], x.letters[start:], m.vertex)
            seen[key] = len(x)
        d = extension(A, H, x, inverse=False)
        if d is not None:
            y, y_tracker = append(A, x, d), tracker.advance(d)
            z, z_tracker = y, y_tracker
            closure = inverse_closure(A, H, y)
            for letter in closure.letters[len(y):]:
                z, z_tracker = append(A, z, letter), z_tracker.advance(letter)
            if _holds(H, z, z_tracker):
                x, tracker = y, y_tracker
                continue
        if _holds(H, x, tracker):
            return x
        i = extension(A, H, x, inverse=True)
        if i is None:
            raise ConsistencyError(f"Minimal word {x.text} fails at the element; chain walk is inconsistent")
        x, tracker = append(A, x, i), tracker.advance(i)
    word = _eventual_period(A, x.letters, m.vertex)
    if word is None:
        raise ConsistencyError(f"Word of element does not settle within {cap} letters")
    logger.warning("Warning: word of element hit the length cap %d; using eventual period %s", cap, word.text)
    return word


def right_word(M: FDModule, H: HPartition, m: PointedElement) -> Word:
    """v(m): the supremum of D in H_1 with ``(.D)`` holding at m."""
    return _sup_word(M, H, m, 1)


def left_word(M: FDModule, H: HPartition, m: PointedElement) -> Word:
    """u(m): the supremum of C in H_-1 with ``(C^-1.)`` holding at m."""
    return _sup_word(M, H, m, -1)


def word_of(M: FDModule, H: HPartition, m: PointedElement) -> TwoSidedWord:
    return TwoSidedWord(left_word(M, H, m), right_word(M, H, m), m.vertex)


def sup_oracle(M: FDModule, H: HPartition, m: PointedElement, sign: int, max_len: int) -> FiniteWord:
    """Brute-force supremum over all finite words up to ``max_len``."""
    A = M.algebra
    holding = [w for w in enumerate_words(A, max_len, m.vertex)
               if side_of(A, H, w) == sign and divisibility_subspace(M, H, w).contains(m.vector)]
    return max(holding, key=cmp_to_key(lambda a, b: int(compare(A, H, a, b))))


def node_words(M: FDModule, H: HPartition, node: int) -> Tuple[FiniteWord, FiniteWord]:
    """``(u, v)`` read off a string module basis node: the word to its left and to its right."""
    if M.kind != "string":
        raise PreconditionError("Node words are defined for string modules only")
    A, w = M.algebra, M.word
    vertex = w.anchor if node == 0 else w.letters[node - 1].right(A)
    rightwards = w.letters[node:]
    leftwards = tuple(l.inverted() for l in reversed(w.letters[:node]))
    if rightwards:
        sign = H.side(vertex, rightwards[0])
    elif leftwards:
        sign = -H.side(vertex, leftwards[0])
    else:
        sign = 1

    def build(letters, s):
        if not letters:
            return FiniteWord(vertex, (), vertex, s)
        return FiniteWord(vertex, letters, letters[-1].right(A), 0)

    if sign == 1:
        return build(leftwards, -1), build(rightwards, 1)
    return build(rightwards, -1), build(leftwards, 1)


# homogeneity and division


def _horizon(M: FDModule, w: OneSidedWord) -> int:
    return len(w.prefix_letters) + (M.dim + 2) * len(w.period)


def _prefix(A: AlgebraPresentation, w: Word, j: int, sign: int) -> FiniteWord:
    letters = w.first_letters(j)
    if not letters:
        return FiniteWord(w.anchor, (), w.anchor, sign)
    return FiniteWord(w.anchor, letters, letters[-1].right(A), 0)


def above_space(M: FDModule, H: HPartition, w: Word, sign: int) -> Subspace:
    """Elements whose word in this chain is strictly greater than ``w``."""
    A = M.algebra
    total = Subspace.zero(M.field, M.dims[w.anchor])
    length = _horizon(M, w) if w.is_infinite else len(w)
    for j in range(length):
        if w.letter_at(j).inverse:
            total = total + divisibility_subspace(M, H, _prefix(A, w, j, sign))
    if not w.is_infinite:
        d = extension(A, H, w, inverse=False)
        if d is not None:
            total = total + divisibility_subspace(M, H, inverse_closure(A, H, append(A, w, d)))
    return total


def at_least_space(M: FDModule, H: HPartition, w: Word, sign: int) -> Subspace:
    """Elements whose word in this chain is at least ``w``."""
    if not w.is_infinite:
        return divisibility_subspace(M, H, w)
    A = M.algebra
    total = Subspace.full(M.field, M.dims[w.anchor])
    for j in range(_horizon(M, w) + 1):
        following = w.letter_at(j)
        if following.direct:
            total = total & divisibility_subspace(M, H, _prefix(A, w, j, sign))
    return total


def is_homogeneous(M: FDModule, H: HPartition, m: PointedElement) -> HomogeneityResult:
    """Decide whether m splits as ``x + (m - x)`` with u(x) > u(m) and v(m - x) > v(m)."""
    w = word_of(M, H, m)
    higher_left = above_space(M, H, w.left, -1)
    higher_right = above_space(M, H, w.right, 1)
    split = higher_left.decompose(higher_right, m.vector)
    if split is None:
        return HomogeneityResult(True, w)
    return HomogeneityResult(False, w, split[0])


def _tail(A: AlgebraPresentation, v: Word, vertex: str, sign: int) -> Word:
    if v.is_infinite:
        if v.prefix_letters:
            return make_one_sided(A, v.prefix_letters[1:], v.period, vertex)
        return make_one_sided(A, (), v.period[1:] + v.period[:1], vertex)
    rest = v.letters[1:]
    if not rest:
        return FiniteWord(vertex, (), vertex, sign)
    return FiniteWord(vertex, rest, v.end, 0)


def _prepend(A: AlgebraPresentation, letter: Letter, u: Word) -> Word:
    if u.is_infinite:
        return make_one_sided(A, (letter,) + u.prefix_letters, u.period, letter.left(A))
    return FiniteWord(letter.left(A), (letter,) + u.letters, u.end if u.letters else letter.right(A), 0)


def _same_word(A: AlgebraPresentation, H: HPartition, a: Word, b: Word) -> bool:
    try:
        return compare(A, H, a, b) == Order.EQ
    except SideMismatchError:
        return False


def divide(M: FDModule, H: HPartition, m: PointedElement, letter: Letter) -> DivisionResult:
    """Divide a homogeneous element by the first letter of its right word.

    Returns n with ``m = alpha n`` (direct letter) or ``n = beta m`` (inverse letter) whose word
    is ``u^-1 letter . v'``.

    Raises:
        PreconditionError: If the right word of m does not start with ``letter``
        ConsistencyError: If no suitable n exists or its word is not the expected one
    """
    A = M.algebra
    w = word_of(M, H, m)
    u, v = w.left, w.right
    if v.letter_at(0) != letter:
        raise PreconditionError(f"Right word {v.text} does not start with {letter.token}")
    target = letter.right(A)
    expected_left = _prepend(A, letter.inverted(), u)
    left_side = H.side(target, letter.inverted())
    rest = _tail(A, v, target, -left_side)
    if rest.is_infinite or rest.letters:
        if side_of(A, H, rest) != -left_side:
            raise ConsistencyError(f"{expected_left.text} and {rest.text} share a side at {target}")

    if letter.direct:
        space = at_least_space(M, H, rest, -left_side)
        alpha = M.matrix(letter.arrow)
        images = [M.field.apply(alpha, b) for b in space.basis]
        columns = [[image[i] for image in images] for i in range(len(m.vector))]
        coefficients = M.field.solve(columns, len(images), m.vector) if images else None
        if coefficients is None:
            raise ConsistencyError(f"No n with {letter.arrow} n = m and right word at least {rest.text}")
        vector = M.field.zero_vector(M.dims[target])
        for c, b in zip(coefficients, space.basis):
            vector = M.field.add(vector, M.field.scale(c, b))
    else:
        vector = M.act(letter.arrow, m.vector)
    n = PointedElement(M, target, vector)

    found = word_of(M, H, n)
    if left_side == -1:
        expected = (expected_left, rest)
    else:
        expected = (rest, expected_left)
    if not (_same_word(A, H, found.left, expected[0]) and _same_word(A, H, found.right, expected[1])):
        raise ConsistencyError(f"Division by {letter.token} gave word {found.text}, "
                               f"expected {expected[0].text} / {expected[1].text}")
    homogeneity = is_homogeneous(M, H, n)
    if not homogeneity.homogeneous:
        raise ConsistencyError(f"Division by {letter.token} produced a non-homogeneous element")
    return DivisionResult(n, found, True)


def divide_along(M: FDModule, H: HPartition, m: PointedElement, word: FiniteWord) -> List[DivisionResult]:
    """Divide letter by letter along ``word``, checking the division contract at each step."""
    steps = []
    current = m
    for letter in word.letters:
        result = divide(M, H, current, letter)
        steps.append(result)
        current = result.element
    return steps


# homomorphisms


def _hom_layout(M: FDModule, N: FDModule) -> Tuple[Dict[str, int], int]:
    offsets, total = {}, 0
    for vertex in M.algebra.vertices:
        offsets[vertex] = total
        total += N.dims[vertex] * M.dims[vertex]
    return offsets, total


def hom_equations(M: FDModule, N: FDModule) -> Tuple[List[List[Any]], Dict[str, int], int]:
    if M.algebra.name != N.algebra.name or M.field != N.field:
        raise PreconditionError("Homomorphisms need modules over the same algebra and field")
    K = M.field
    offsets, total = _hom_layout(M, N)
    equations = []
    for a in M.algebra.arrows:
        s, t = a.source, a.target
        rho_m, rho_n = K.rows_of(M.matrix(a.name)), K.rows_of(N.matrix(a.name))
        for i in range(N.dims[t]):
            for j in range(M.dims[s]):
                row = [K.zero] * total
                for k in range(M.dims[t]):
                    row[offsets[t] + i * M.dims[t] + k] += rho_m[k][j]
                for k in range(N.dims[s]):
                    row[offsets[s] + k * M.dims[s] + j] -= rho_n[i][k]
                equations.append(row)
    return equations, offsets, total


def unpack_hom(M: FDModule, N: FDModule, offsets: Dict[str, int], vector: Sequence) -> Dict[str, DomainMatrix]:
    K = M.field
    maps = {}
    for vertex in M.algebra.vertices:
        rows, cols = N.dims[vertex], M.dims[vertex]
        start = offsets[vertex]
        entries = [list(vector[start + i * cols:start + (i + 1) * cols]) for i in range(rows)]
        maps[vertex] = K.matrix(entries, rows, cols)
    return maps


def hom_space(M: FDModule, N: FDModule) -> List[Dict[str, DomainMatrix]]:
    """A basis of Hom(M, N) as per-vertex matrices."""
    equations, offsets, total = hom_equations(M, N)
    return [unpack_hom(M, N, offsets, v) for v in M.field.nullspace(equations, total)]


def hom_dimension_oracle(M: FDModule, N: FDModule) -> int:
    equations, _, total = hom_equations(M, N)
    return total - M.field.rank(equations, total)


def is_homomorphism(M: FDModule, N: FDModule, maps: Dict[str, DomainMatrix]) -> bool:
    K = M.field
    for a in M.algebra.arrows:
        lhs = K.matmul(maps[a.target], M.matrix(a.name))
        rhs = K.matmul(N.matrix(a.name), maps[a.source])
        if not K.matrices_equal(lhs, rhs):
            return False
    return True


# realizations


def generated_submodule(M: FDModule, m: PointedElement) -> Dict[str, Subspace]:
    """The submodule ``A m``: the span of m closed under every arrow."""
    A, K = M.algebra, M.field
    spaces = {vertex: Subspace.zero(K, M.dims[vertex]) for vertex in A.vertices}
    spaces[m.vertex] = Subspace.span(K, M.dims[m.vertex], [m.vector])
    changed = True
    while changed:
        changed = False
        for a in A.arrows:
            image = spaces[a.source].image(M.matrix(a.name))
            if not image <= spaces[a.target]:
                spaces[a.target] = spaces[a.target] + image
                changed = True
    return spaces


def _complement(K: ExactField, U: Subspace) -> List[int]:
    """Coordinates whose unit vectors extend a basis of U to the whole space."""
    kept, span = [], U
    for i in range(U.ambient):
        unit = K.unit_vector(U.ambient, i)
        if not span.contains(unit):
            kept.append(i)
            span = span + Subspace.span(K, U.ambient, [unit])
    return kept


def _residue(K: ExactField, U: Subspace, kept: List[int], v: Sequence) -> Vector:
    """Coordinates of ``v + U`` along the kept unit vectors."""
    generators = list(U.basis) + [K.unit_vector(U.ambient, i) for i in kept]
    if not generators:
        return ()
    columns = [[g[i] for g in generators] for i in range(U.ambient)]
    coefficients = K.solve(columns, len(generators), v)
    if coefficients is None:
        raise ConsistencyError("Complement does not span the ambient space")
    return tuple(coefficients[U.dim:])


def quotient_module(M: FDModule, U: Dict[str, Subspace], point: Optional[PointedElement] = None):
    """``M / U`` for a submodule U, with the image of ``point`` if one is given.

    Raises:
        PreconditionError: If U is not closed under the arrows
    """
    A, K = M.algebra, M.field
    for a in A.arrows:
        if not U[a.source].image(M.matrix(a.name)) <= U[a.target]:
            raise PreconditionError(f"Subspaces are not closed under {a.name}")
    kept = {vertex: _complement(K, U[vertex]) for vertex in A.vertices}
    labels = {vertex: [M.labels[vertex][i] for i in kept[vertex]] for vertex in A.vertices}
    parts = _empty_module(A, K, labels)
    for a in A.arrows:
        rows = parts["rows"][a.name]
        for j, i in enumerate(kept[a.source]):
            image = M.act(a.name, K.unit_vector(M.dims[a.source], i))
            for t, x in enumerate(_residue(K, U[a.target], kept[a.target], image)):
                rows[t][j] = x
    Q = _finish(A, K, parts, kind="quotient")
    if point is None:
        return Q
    return Q, PointedElement(Q, point.vertex, _residue(K, U[point.vertex], kept[point.vertex], point.vector))


def amalgamate(M: FDModule, m: PointedElement, N: FDModule, n: PointedElement) -> Tuple[FDModule, PointedElement]:
    """The pushout of ``(M, m)`` and ``(N, n)`` identifying the two points.

    It freely realizes the conjunction of the formulas realized by m and n.
    """
    if m.vertex != n.vertex:
        raise SideMismatchError(f"Points at {m.vertex} and {n.vertex} cannot be identified")
    total = direct_sum(M, N)
    first = include(total, 0, m)
    U = generated_submodule(total, first - include(total, 1, n))
    return quotient_module(total, U, first)


def free_realization(A: AlgebraPresentation, H: HPartition, formula: PPWordFormula,
                     K: Optional[ExactField] = None) -> Tuple[FDModule, PointedElement]:
    """A pointed module generated by an element satisfying exactly the consequences of ``formula``.

    When ``C^-1 D`` is a string this is M(C^-1 D) pointed between C^-1 and D. Otherwise M(C)
    and M(D) are glued along their first nodes.
    """
    vertex = formula.vertex
    C = formula.left if formula.left is not None else FiniteWord(vertex, (), vertex, -1)
    D = formula.right if formula.right is not None else FiniteWord(vertex, (), vertex, 1)
    try:
        word = concat(A, invert(C), D)
    except StringAlgebraError as e:
        logger.debug("Gluing the realization of %s: %s", formula.text, str(e))
        MC, MD = string_module(A, C, K), string_module(A, D, K)
        return amalgamate(MC, MC.element(0), MD, MD.element(0))
    M = string_module(A, word, K)
    return M, M.element(len(C))


def realize_sum(A: AlgebraPresentation, H: HPartition, formula: FormulaSum,
                K: Optional[ExactField] = None) -> Tuple[FDModule, PointedElement]:
    """Direct sum of the terms' free realizations, pointed at the sum of their points."""
    M, m = free_realization(A, H, formula.terms[0], K)
    for term in formula.terms[1:]:
        N, n = free_realization(A, H, term, K)
        total = direct_sum(M, N)
        m = include(total, 0, m) + include(total, 1, n)
        M = total
    return M, m


def _arrow_image(M: FDModule, arrow: str) -> Subspace:
    return Subspace.full(M.field, M.dims[M.algebra.arrow(arrow).source]).image(M.matrix(arrow))


def realized_bands(M: FDModule, bands: Sequence[Band]) -> List[Band]:
    """Bands ``gamma ... delta^-1`` with ``gamma M`` and ``delta M`` meeting nontrivially."""
    realized = []
    for band in bands:
        gamma, delta = band.letters[0].arrow, band.letters[-1].arrow
        meet = _arrow_image(M, gamma) & _arrow_image(M, delta)
        if not meet.is_zero():
            realized.append(band)
    return realized


def module_from_json(A: AlgebraPresentation, document: Dict[str, Any], K: Optional[ExactField] = None) -> FDModule:
    """Read ``{dims, matrices}`` with exact fraction strings.

    Raises:
        PreconditionError: If shapes disagree with the dimensions or relations do not vanish
    """
    K = K or ExactField()
    try:
        dims = {vertex: int(document["dims"].get(vertex, 0)) for vertex in A.vertices}
        matrices = {}
        for a in A.arrows:
            rows = document["matrices"].get(a.name, [])
            entries = [[K.parse(str(x)) for x in row] for row in rows]
            if dims[a.target] and (len(entries) != dims[a.target] or any(len(r) != dims[a.source] for r in entries)):
                raise PreconditionError(f"Matrix of {a.name} does not have shape {dims[a.target]}x{dims[a.source]}")
            matrices[a.name] = K.matrix(entries, dims[a.target], dims[a.source])
    except (KeyError, TypeError, AttributeError) as e:
        raise PreconditionError(f"Error reading module document: {str(e)}")
    labels = {vertex: list(range(dims[vertex])) for vertex in A.vertices}
    M = FDModule(A, K, dims, matrices, labels)
    if not M.relations_vanish():
        raise PreconditionError("Relations do not vanish on the given matrices")
    return M
