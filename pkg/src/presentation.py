"""Quiver-with-relations presentations of string algebras: parsing, validation, quotients."""

import json
import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, List, Optional, Set, Tuple

import networkx as nx

from .errors import ParseError, PresentationError

logger = logging.getLogger(__name__)

TOKEN = r"[A-Za-z0-9_']+"
ALGEBRA_LINE = re.compile(rf"^algebra\s+(?P<name>\S+)\s*$")
VERTICES_LINE = re.compile(r"^vertices\s*:(?P<body>.*)$")
ARROW_LINE = re.compile(rf"^arrow\s+(?P<name>{TOKEN})\s*:\s*(?P<source>{TOKEN})\s*->\s*(?P<target>{TOKEN})\s*$")
RELATION_LINE = re.compile(r"^relation\s*:(?P<body>.*)$")
NAME_PATTERN = re.compile(rf"^{TOKEN}$")


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class AlgebraPresentation:
    """A quiver with monomial relations.

    Relations are stored in written order: ``("d", "g")`` is the path dg, which goes
    first along g and then along d.
    """

    name: str
    vertices: Tuple[str, ...]
    arrows: Tuple[Arrow, ...]
    relations: Tuple[Tuple[str, ...], ...] = ()
    validated: bool = False
    _arrow_index: Dict[str, Arrow] = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_arrow_index", {arrow.name: arrow for arrow in self.arrows})

    def arrow(self, name: str) -> Arrow:
        try:
            return self._arrow_index[name]
        except KeyError:
            raise PresentationError(f"Unknown arrow: {name}")

    def has_arrow(self, name: str) -> bool:
        return name in self._arrow_index

    @property
    def arrow_names(self) -> Tuple[str, ...]:
        return tuple(arrow.name for arrow in self.arrows)

    def incoming(self, vertex: str) -> List[Arrow]:
        return [arrow for arrow in self.arrows if arrow.target == vertex]

    def outgoing(self, vertex: str) -> List[Arrow]:
        return [arrow for arrow in self.arrows if arrow.source == vertex]

    @property
    def relation_set(self) -> Set[Tuple[str, ...]]:
        return set(self.relations)

    @property
    def max_relation_length(self) -> int:
        return max((len(relation) for relation in self.relations), default=0)

    def is_relation(self, path: Tuple[str, ...]) -> bool:
        return tuple(path) in self.relation_set

    def contains_relation(self, path: Tuple[str, ...]) -> bool:
        """Whether some relation occurs as a contiguous factor of the written path."""
        path = tuple(path)
        for relation in self.relations:
            n = len(relation)
            for start in range(len(path) - n + 1):
                if path[start:start + n] == relation:
                    return True
        return False

    def composable(self, left: str, right: str) -> bool:
        """Whether the written path ``left right`` is a path (right goes first)."""
        return self.arrow(right).target == self.arrow(left).source


@dataclass
class Violation:
    axiom: str
    vertex: Optional[str]
    arrows: Tuple[str, ...]
    message: str


@dataclass
class ValidationResult:
    ok: bool
    presentation: AlgebraPresentation
    violations: List[Violation] = field(default_factory=list)
    nonzero_compositions: List[Tuple[str, str]] = field(default_factory=list)


def normalize_relations(relations: Iterable[Tuple[str, ...]]) -> Tuple[Tuple[str, ...], ...]:
    """Drop duplicates and every relation that contains another relation as a factor."""
    unique = sorted(set(tuple(relation) for relation in relations), key=lambda r: (len(r), r))
    kept: List[Tuple[str, ...]] = []
    for relation in unique:
        shadowed = False
        for other in kept:
            n = len(other)
            if any(relation[i:i + n] == other for i in range(len(relation) - n + 1)):
                shadowed = True
                break
        if not shadowed:
            kept.append(relation)
    return tuple(sorted(kept))


def _check_relation(arrows: Dict[str, Arrow], relation: Tuple[str, ...], line: Optional[int] = None) -> None:
    where = f" (line {line})" if line is not None else ""
    if len(relation) < 2:
        raise PresentationError(f"Relations must have length at least 2, got {' '.join(relation)}{where}")
    for name in relation:
        if name not in arrows:
            raise PresentationError(f"Relation uses unknown arrow {name}{where}")
    for left, right in zip(relation, relation[1:]):
        if arrows[right].target != arrows[left].source:
            raise PresentationError(f"Relation {' '.join(relation)} is not composable at {left} {right}{where}")


def build_presentation(name: str,
                       vertices: Iterable[str],
                       arrows: Iterable[Tuple[str, str, str]],
                       relations: Iterable[Iterable[str]] = ()) -> AlgebraPresentation:
    """Assemble and structurally check a presentation.

    Args:
        name: Algebra name
        vertices: Vertex identifiers
        arrows: Triples (name, source, target)
        relations: Arrow-name sequences in written (right-to-left composition) order
    Returns:
        Structurally well-formed, not yet validated presentation
    Raises:
        PresentationError: On duplicate names, dangling vertices or bad relations
    """
    vertex_list = list(vertices)
    if len(set(vertex_list)) != len(vertex_list):
        raise PresentationError("Vertex identifiers must be unique")
    arrow_index: Dict[str, Arrow] = {}
    for arrow_name, source, target in arrows:
        if arrow_name in arrow_index:
            raise PresentationError(f"Duplicate arrow name: {arrow_name}")
        for endpoint in (source, target):
            if endpoint not in vertex_list:
                raise PresentationError(f"Arrow {arrow_name} references unknown vertex {endpoint}")
        arrow_index[arrow_name] = Arrow(arrow_name, source, target)
    relation_list = [tuple(relation) for relation in relations]
    for relation in relation_list:
        _check_relation(arrow_index, relation)
    return AlgebraPresentation(name=name,
                               vertices=tuple(vertex_list),
                               arrows=tuple(arrow_index.values()),
                               relations=normalize_relations(relation_list))


def parse_algebra(text: str) -> AlgebraPresentation:
    """Parse the algebra DSL.

    Args:
        text: DSL source (``algebra``, ``vertices:``, ``arrow``, ``relation:`` lines; ``#`` comments)
    Returns:
        Structurally well-formed presentation, not yet axiom-validated
    Raises:
        ParseError: On syntax errors, with line and column
        PresentationError: On dangling vertex references or non-composable relations
    """
    name = None
    vertices: List[str] = []
    arrows: Dict[str, Arrow] = {}
    relations: List[Tuple[Tuple[str, ...], int]] = []
    saw_vertices = False

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        column = raw.find(line) + 1
        match = ALGEBRA_LINE.match(line)
        if match:
            if name is not None:
                raise ParseError("Duplicate algebra header", number, column)
            name = match.group("name")
            continue
        match = VERTICES_LINE.match(line)
        if match:
            tokens = match.group("body").split()
            for token in tokens:
                if not NAME_PATTERN.match(token):
                    raise ParseError(f"Invalid vertex name {token!r}", number, raw.find(token) + 1)
                if token in vertices:
                    raise ParseError(f"Duplicate vertex {token}", number, raw.find(token) + 1)
                vertices.append(token)
            saw_vertices = True
            continue
        match = ARROW_LINE.match(line)
        if match:
            arrow_name = match.group("name")
            if arrow_name in arrows:
                raise ParseError(f"Duplicate arrow {arrow_name}", number, column)
            for endpoint in ("source", "target"):
                vertex = match.group(endpoint)
                if vertex not in vertices:
                    raise PresentationError(
                        f"Arrow {arrow_name} references unknown vertex {vertex} (line {number})")
            arrows[arrow_name] = Arrow(arrow_name, match.group("source"), match.group("target"))
            continue
        match = RELATION_LINE.match(line)
        if match:
            tokens = tuple(match.group("body").split())
            if not tokens:
                raise ParseError("Empty relation", number, column)
            relations.append((tokens, number))
            continue
        raise ParseError(f"Unrecognized line {line!r}", number, column)

    if name is None:
        raise ParseError("Missing 'algebra <name>' header", 1, 1)
    if not saw_vertices:
        raise ParseError("Missing 'vertices:' line", 1, 1)
    for relation, number in relations:
        _check_relation(arrows, relation, number)
    return AlgebraPresentation(name=name,
                               vertices=tuple(vertices),
                               arrows=tuple(arrows.values()),
                               relations=normalize_relations(relation for relation, _ in relations))


def load_algebra(path: str) -> AlgebraPresentation:
    """Read and parse an algebra file; ``.json`` files use the JSON document format."""
    with open(path, encoding="utf-8") as f:
        text = f.read()
    if path.endswith(".json"):
        return from_json(json.loads(text))
    return parse_algebra(text)


def to_dsl(A: AlgebraPresentation) -> str:
    lines = [f"algebra {A.name}", "vertices: " + " ".join(A.vertices)]
    lines += [f"arrow {arrow.name}: {arrow.source} -> {arrow.target}" for arrow in A.arrows]
    lines += ["relation: " + " ".join(relation) for relation in A.relations]
    return "\n".join(lines) + "\n"


def to_json(A: AlgebraPresentation) -> Dict[str, Any]:
    return {
        "name": A.name,
        "vertices": list(A.vertices),
        "arrows": [{"name": arrow.name, "source": arrow.source, "target": arrow.target} for arrow in A.arrows],
        "relations": [list(relation) for relation in A.relations],
    }


def from_json(document: Dict[str, Any]) -> AlgebraPresentation:
    """Inverse of :func:`to_json`.

    Raises:
        PresentationError: If fields are missing or the presentation is malformed
    """
    try:
        return build_presentation(document["name"],
                                  document["vertices"],
                                  [(a["name"], a["source"], a["target"]) for a in document["arrows"]],
                                  document.get("relations", []))
    except (KeyError, TypeError) as e:
        raise PresentationError(f"Error reading algebra document: {str(e)}")


def _nonzero_compositions(A: AlgebraPresentation) -> List[Tuple[str, str]]:
    """Written pairs ``(beta, alpha)`` with beta after alpha composable and not a relation."""
    pairs = []
    for beta in A.arrows:
        for alpha in A.incoming(beta.source):
            if not A.is_relation((beta.name, alpha.name)):
                pairs.append((beta.name, alpha.name))
    return sorted(pairs)


def _relation_free_cycle(A: AlgebraPresentation) -> Optional[List[str]]:
    """A cycle of arrows avoiding every relation, if one exists."""
    k = max(1, A.max_relation_length - 1)
    graph = nx.DiGraph()
    paths = [(arrow.name,) for arrow in A.arrows]
    for _ in range(k - 1):
        paths = [path + (arrow.name,) for path in paths for arrow in A.incoming(A.arrow(path[-1]).source)
                 if not A.contains_relation(path + (arrow.name,))]
    graph.add_nodes_from(paths)
    for path in paths:
        for arrow in A.incoming(A.arrow(path[-1]).source):
            longer = path + (arrow.name,)
            if not A.contains_relation(longer):
                graph.add_edge(path, longer[1:])
    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        return None
    return [edge[0][0] for edge in cycle]


def validate_string_algebra(A: AlgebraPresentation) -> ValidationResult:
    """Check the string algebra axioms.

    Violations are returned, never raised. On success the returned presentation has its
    ``validated`` flag set and ``nonzero_compositions`` lists the written 2-letter direct
    paths that are not relations.
    """
    violations: List[Violation] = []
    for vertex in A.vertices:
        incoming = sorted(arrow.name for arrow in A.incoming(vertex))
        outgoing = sorted(arrow.name for arrow in A.outgoing(vertex))
        if len(incoming) > 2:
            violations.append(Violation("in-degree", vertex, tuple(incoming),
                                        f"more than two ingoing arrows at vertex {vertex}"))
        if len(outgoing) > 2:
            violations.append(Violation("out-degree", vertex, tuple(outgoing),
                                        f"more than two outgoing arrows at vertex {vertex}"))

    nonzero = _nonzero_compositions(A)
    after = defaultdict(list)
    before = defaultdict(list)
    for beta, alpha in nonzero:
        after[alpha].append(beta)
        before[beta].append(alpha)
    for beta, alphas in sorted(before.items()):
        if len(alphas) > 1:
            violations.append(Violation("unique-composition", A.arrow(beta).source, (beta,) + tuple(alphas),
                                        f"more than one nonzero composition {beta} x for x in {', '.join(alphas)}"))
    for alpha, betas in sorted(after.items()):
        if len(betas) > 1:
            violations.append(Violation("unique-composition", A.arrow(alpha).target, tuple(betas) + (alpha,),
                                        f"more than one nonzero composition x {alpha} for x in {', '.join(betas)}"))

    if normalize_relations(A.relations) != tuple(sorted(A.relations)):
        violations.append(Violation("normalized-relations", None, (), "a relation contains another relation"))

    cycle = _relation_free_cycle(A)
    if cycle is not None:
        violations.append(Violation("finite-dimension", A.arrow(cycle[0]).target, tuple(cycle),
                                    f"arrow cycle {' '.join(cycle)} avoids every relation"))

    ok = not violations
    for violation in violations:
        logger.debug("Violation in %s: %s", A.name, violation.message)
    return ValidationResult(ok=ok,
                            presentation=replace(A, validated=ok),
                            violations=violations,
                            nonzero_compositions=nonzero if ok else [])


def require_validated(A: AlgebraPresentation) -> AlgebraPresentation:
    """Return a validated copy of ``A`` or raise listing the violated axioms."""
    if A.validated:
        return A
    result = validate_string_algebra(A)
    if not result.ok:
        messages = "; ".join(violation.message for violation in result.violations)
        raise PresentationError(f"{A.name} is not a string algebra: {messages}")
    return result.presentation


def quotient_by_arrows(A: AlgebraPresentation, kill: Iterable[str]) -> AlgebraPresentation:
    """Factor out the ideal generated by the arrows in ``kill``.

    Relations through a killed arrow are dropped; vertices are kept.

    Raises:
        PresentationError: If ``kill`` names an unknown arrow
    """
    kill = set(kill)
    for name in sorted(kill):
        A.arrow(name)
    if not kill:
        return A
    arrows = tuple(arrow for arrow in A.arrows if arrow.name not in kill)
    relations = tuple(relation for relation in A.relations if not kill.intersection(relation))
    quotient = AlgebraPresentation(name=f"{A.name}/({','.join(sorted(kill))})",
                                   vertices=A.vertices,
                                   arrows=arrows,
                                   relations=normalize_relations(relations))
    if A.validated:
        result = validate_string_algebra(quotient)
        if not result.ok:
            logger.warning("Warning: quotient %s failed validation", quotient.name)
        return result.presentation
    return quotient
