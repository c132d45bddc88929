"""Letter automaton, bands, domesticity and the bridge quiver."""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import ConsistencyError, NonDomesticError
from .presentation import AlgebraPresentation, quotient_by_arrows, require_validated
from .words import (FiniteWord, Letter, can_append, cyclically_valid, entering_letters,
                    is_valid_letters, primitive_root)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LetterAutomaton:
    """Nodes are valid words of length ``k``; an edge is a valid word of length ``k + 1``.

    With relations of length at most 2, ``k`` is 1 and the nodes are the letters.
    """

    k: int
    graph: nx.DiGraph


@dataclass(frozen=True, order=True)
class Band:
    """A primitive cyclic word stored in its least rotation of the form ``alpha ... beta^-1``."""

    letters: Tuple[Letter, ...]

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def text(self) -> str:
        return " ".join(letter.token for letter in self.letters)

    def __str__(self) -> str:
        return self.text

    def rotations(self) -> List[Tuple[Letter, ...]]:
        n = len(self.letters)
        return [self.letters[i:] + self.letters[:i] for i in range(n)]


@dataclass
class BandSet:
    bands: Tuple[Band, ...]
    max_len: int
    truncated: bool


@dataclass
class DomesticResult:
    domestic: bool
    n: Optional[int] = None
    witness: Optional[Tuple[Tuple[Letter, ...], Tuple[Letter, ...]]] = None
    bands: Tuple[Band, ...] = ()

    @property
    def text(self) -> str:
        if self.domestic:
            return f"Domestic({self.n})"
        first, second = (" ".join(l.token for l in cycle) for cycle in self.witness)
        return f"NonDomestic(witness: [{first}] and [{second}])"


@dataclass
class Cover:
    lower: Band
    upper: Band
    witness: Tuple[Letter, ...]

    @property
    def witness_text(self) -> str:
        return " ".join(letter.token for letter in self.witness)


@dataclass
class BridgeQuiver:
    elements: Tuple[Band, ...]
    covers: List[Cover]
    relations: Dict[Tuple[Band, Band], Tuple[Letter, ...]]
    bound: int
    stable: bool


@dataclass
class BandFactsReport:
    passed: bool
    checked: Dict[str, int] = field(default_factory=dict)
    counterexamples: List[str] = field(default_factory=list)


def letter_automaton(A: AlgebraPresentation) -> LetterAutomaton:
    """Build the automaton whose walks spell exactly the valid words of length > k."""
    A = require_validated(A)
    k = max(1, A.max_relation_length - 1)
    words: List[Tuple[Letter, ...]] = [(letter,) for vertex in A.vertices for letter in entering_letters(A, vertex)]
    for _ in range(k - 1):
        words = [w + (letter,) for w in words for letter in entering_letters(A, w[-1].right(A))
                 if can_append(A, w, letter)]
    graph = nx.DiGraph()
    graph.add_nodes_from(words)
    for w in words:
        for letter in entering_letters(A, w[-1].right(A)):
            if can_append(A, w, letter):
                graph.add_edge(w, w[1:] + (letter,))
    return LetterAutomaton(k, graph)


def _letter_key(letters: Sequence[Letter]) -> Tuple:
    return tuple((l.arrow, l.inverse) for l in letters)


def normalize_band(A: AlgebraPresentation, letters: Sequence[Letter]) -> Optional[Band]:
    """The band of a cyclic word, or None if the cyclic word is not a band."""
    letters = tuple(letters)
    if not letters or primitive_root(letters) != letters:
        return None
    if all(l.direct for l in letters) or all(l.inverse for l in letters):
        return None
    if not cyclically_valid(A, letters):
        return None
    n = len(letters)
    forms = [letters[i:] + letters[:i] for i in range(n)]
    forms = [f for f in forms if f[0].direct and f[-1].inverse]
    return Band(min(forms, key=_letter_key))


def invert_band(A: AlgebraPresentation, band: Band) -> Band:
    inverse = normalize_band(A, tuple(l.inverted() for l in reversed(band.letters)))
    if inverse is None:
        raise ConsistencyError(f"Inverse of band {band.text} is not a band")
    return inverse


def _nontrivial_components(automaton: LetterAutomaton) -> List[nx.DiGraph]:
    components = []
    for nodes in nx.strongly_connected_components(automaton.graph):
        sub = automaton.graph.subgraph(nodes)
        if len(nodes) > 1 or sub.number_of_edges() > 0:
            components.append(sub)
    return sorted(components, key=lambda sub: min(_letter_key(n) for n in sub.nodes))


def _cycle_through(sub: nx.DiGraph, node, successor) -> Tuple[Letter, ...]:
    path = nx.shortest_path(sub, successor, node)
    return tuple(n[-1] for n in path)


def is_domestic(A: AlgebraPresentation) -> DomesticResult:
    """Decide domesticity: every cyclic component of the automaton must be one simple cycle.

    Returns:
        Domestic(n) with n the number of bands up to rotation and inversion, or a witness of
        two distinct cycles through a common node
    """
    A = require_validated(A)
    automaton = letter_automaton(A)
    bands = set()
    for sub in _nontrivial_components(automaton):
        if sub.number_of_edges() != sub.number_of_nodes():
            node = min((n for n in sub.nodes if sub.out_degree(n) >= 2), key=_letter_key)
            first, second = sorted(sub.successors(node), key=_letter_key)[:2]
            witness = (_cycle_through(sub, node, first), _cycle_through(sub, node, second))
            logger.debug("%s is non-domestic; two cycles through %s", A.name, _letter_key(node))
            return DomesticResult(False, None, witness)
        start = min(sub.nodes, key=_letter_key)
        cycle = _cycle_through(sub, start, next(iter(sub.successors(start))))
        band = normalize_band(A, cycle)
        if band is not None:
            bands.add(band)
    classes = {min(band, invert_band(A, band)) for band in bands}
    return DomesticResult(True, len(classes), None, tuple(sorted(bands)))


def enumerate_bands(A: AlgebraPresentation, max_len: int) -> BandSet:
    """All bands of length at most ``max_len``.

    Returns:
        BandSet whose ``truncated`` flag is set when longer bands exist
    """
    A = require_validated(A)
    automaton = letter_automaton(A)
    graph = automaton.graph
    found = set()
    for start in graph.nodes:
        stack = [(start, ())]
        while stack:
            node, letters = stack.pop()
            for target in graph.successors(node):
                walk = letters + (target[-1],)
                if target == start:
                    band = normalize_band(A, walk)
                    if band is not None:
                        found.add(band)
                if len(walk) < max_len:
                    stack.append((target, walk))

    truncated = False
    for sub in _nontrivial_components(automaton):
        if sub.number_of_edges() != sub.number_of_nodes() or sub.number_of_nodes() > max_len:
            truncated = True
    if truncated:
        logger.warning("Warning: band enumeration for %s truncated at length %d", A.name, max_len)
    return BandSet(tuple(sorted(found)), max_len, truncated)


def band_family(A: AlgebraPresentation) -> Tuple[Band, ...]:
    """All bands of a domestic algebra, a band and its inverse counted separately.

    Raises:
        NonDomesticError: If the algebra has infinitely many bands
    """
    result = is_domestic(A)
    if not result.domestic:
        raise NonDomesticError(f"{A.name} is not domestic")
    return result.bands


def default_bridge_bound(A: AlgebraPresentation, bands: Sequence[Band]) -> int:
    letters = 2 * len(A.arrows)
    return letters * letters + max((len(band) for band in bands), default=0)


def _bridges(A: AlgebraPresentation, bands: Sequence[Band], bound: int) -> Dict[Tuple[Band, Band], Tuple[Letter, ...]]:
    """Shortest ``u`` with ``C u D`` valid for every ordered pair of distinct bands."""
    k = max(2, A.max_relation_length)
    found: Dict[Tuple[Band, Band], Tuple[Letter, ...]] = {}
    for C in bands:
        queue = deque([(C.letters, ())])
        seen = {C.letters[-k:]}
        while queue:
            word, u = queue.popleft()
            for D in bands:
                if D != C and (C, D) not in found and is_valid_letters(A, word[-k:] + D.letters):
                    found[(C, D)] = u
            if len(u) >= bound:
                continue
            for letter in entering_letters(A, word[-1].right(A)):
                if can_append(A, word, letter):
                    longer = word + (letter,)
                    if longer[-k:] not in seen:
                        seen.add(longer[-k:])
                        queue.append((longer, u + (letter,)))
    return found


def bridge_quiver(A: AlgebraPresentation, bound: Optional[int] = None) -> BridgeQuiver:
    """The poset of bands ordered by ``C <= D`` iff some ``C u D`` is a string.

    Raises:
        NonDomesticError: On non-domestic input
        ConsistencyError: If the relation fails antisymmetry
    """
    A = require_validated(A)
    bands = band_family(A)
    bound = bound or default_bridge_bound(A, bands)
    relations = _bridges(A, bands, bound)
    stable = set(_bridges(A, bands, 2 * bound)) == set(relations)
    if not stable:
        logger.warning("Warning: bridge relation of %s changes when the bound %d is doubled", A.name, bound)

    graph = nx.DiGraph()
    graph.add_nodes_from(bands)
    graph.add_edges_from(relations)
    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        raise ConsistencyError(f"Bridge relation is not antisymmetric: {' -> '.join(c.text for c, _ in cycle)}")
    reduced = nx.transitive_reduction(graph)
    covers = [Cover(lower, upper, relations[(lower, upper)]) for lower, upper in sorted(reduced.edges)]
    return BridgeQuiver(tuple(sorted(bands)), covers, relations, bound, stable)


def bridge_dot(quiver: BridgeQuiver, name: str = "bridge_quiver") -> str:
    """DOT text of the covering relation, lower bands drawn below upper ones."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for band in sorted(quiver.elements, key=lambda b: b.text):
        lines.append(f'  "{band.text}";')
    for cover in sorted(quiver.covers, key=lambda c: (c.lower.text, c.upper.text)):
        lines.append(f'  "{cover.lower.text}" -> "{cover.upper.text}" [label="{cover.witness_text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _inverse_direct_pairs(band: Band) -> set:
    n = len(band.letters)
    pairs = set()
    for i in range(n):
        a, b = band.letters[i], band.letters[(i + 1) % n]
        if a.inverse and b.direct:
            pairs.add((a, b))
    return pairs


def _band_forms(band: Band) -> List[Tuple[Letter, ...]]:
    return [r for r in band.rotations() if r[0].direct and r[-1].inverse]


def band_facts_audit(A: AlgebraPresentation, word_bound: int = 12) -> BandFactsReport:
    """Check the structural facts about bands of a domestic algebra.

    Distinct bands share no inverse-direct transition, no two distinct bands have a band
    form starting with the same arrow, and every string running from a band's first letter
    to its last letter (within ``word_bound``) is a power of that band.

    Raises:
        NonDomesticError: On non-domestic input
    """
    A = require_validated(A)
    bands = band_family(A)
    report = BandFactsReport(True, {"shared_transition": 0, "shared_start": 0, "band_powers": 0})

    for i, E in enumerate(bands):
        for F in bands[i + 1:]:
            report.checked["shared_transition"] += 1
            shared = _inverse_direct_pairs(E) & _inverse_direct_pairs(F)
            if shared:
                pair = sorted(shared)[0]
                report.counterexamples.append(
                    f"{E.text} and {F.text} both contain {pair[0].token} {pair[1].token}")
            report.checked["shared_start"] += 1
            starts_e = {form[0] for form in _band_forms(E)}
            starts_f = {form[0] for form in _band_forms(F)}
            common = starts_e & starts_f
            if common:
                report.counterexamples.append(
                    f"{E.text} and {F.text} both have band forms starting with {sorted(common)[0].token}")

    for E in bands:
        first, last = E.letters[0], E.letters[-1]
        stack = [(first,)]
        while stack:
            word = stack.pop()
            if len(word) > 1 and word[-1] == last:
                report.checked["band_powers"] += 1
                n, rest = divmod(len(word), len(E))
                if rest or word != E.letters * n:
                    report.counterexamples.append(
                        f"{' '.join(l.token for l in word)} runs from {first.token} to {last.token} "
                        f"but is not a power of {E.text}")
            if len(word) < word_bound:
                for letter in entering_letters(A, word[-1].right(A)):
                    if can_append(A, word, letter):
                        stack.append(word + (letter,))

    report.passed = not report.counterexamples
    return report


def quotient_to_band(A: AlgebraPresentation, band: Band) -> AlgebraPresentation:
    """Kill every arrow that does not occur in ``band``."""
    keep = {letter.arrow for letter in band.letters}
    return quotient_by_arrows(A, [arrow.name for arrow in A.arrows if arrow.name not in keep])


def word_of_band(A: AlgebraPresentation, band: Band, power: int = 1) -> FiniteWord:
    letters = band.letters * power
    return FiniteWord(letters[0].left(A), letters, letters[-1].right(A), 0)
