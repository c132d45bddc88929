"""Graph-map bases of Hom spaces between string modules, and pointed morphisms."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from sympy.polys.matrices import DomainMatrix

from .errors import ConsistencyError, PreconditionError, SideMismatchError
from .repmod import (FDModule, PointedElement, hom_dimension_oracle, hom_equations, is_homomorphism,
                     string_module, unpack_hom)
from .words import FiniteWord, Letter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FactorTriple:
    """A common factor c of u and v: ``u = u_L c u_R`` and ``v = v_L c v_R`` (or ``v_L c^-1 v_R``).

    ``source_start`` and ``target_start`` are the basis nodes where c begins in u and v.
    """

    factor: Tuple[Letter, ...]
    vertex: str
    source_start: int
    target_start: int
    reversed: bool = False

    @property
    def length(self) -> int:
        return len(self.factor)

    @property
    def node_map(self) -> Tuple[Tuple[int, int], ...]:
        """Pairs ``(node of u, node of v)`` identified by the map."""
        k = self.length
        if self.reversed:
            return tuple((self.source_start + i, self.target_start + k - i) for i in range(k + 1))
        return tuple((self.source_start + i, self.target_start + i) for i in range(k + 1))

    @property
    def text(self) -> str:
        c = " ".join(l.token for l in self.factor) or f"1[{self.vertex}]"
        orientation = "reversed" if self.reversed else "forward"
        return f"{c} @ u[{self.source_start}] -> v[{self.target_start}] ({orientation})"


@dataclass
class GraphMap:
    triple: FactorTriple
    matrices: Dict[str, DomainMatrix] = field(default_factory=dict)


def _node_vertex(A, w: FiniteWord, node: int) -> str:
    return w.anchor if node == 0 else w.letters[node - 1].right(A)


def _quotient_closed(w: FiniteWord, start: int, k: int) -> bool:
    before = w.letter_at(start - 1)
    after = w.letter_at(start + k)
    return (before is None or before.direct) and (after is None or after.inverse)


def _submodule_closed(w: FiniteWord, start: int, k: int) -> bool:
    before = w.letter_at(start - 1)
    after = w.letter_at(start + k)
    return (before is None or before.inverse) and (after is None or after.direct)


def admissible_triples(A, u: FiniteWord, v: FiniteWord) -> List[FactorTriple]:
    """Factors of u closed under quotients that sit in v closed under submodules.

    Ordered by position in u, then in v, forward before reversed; matches inducing the same
    node identification are listed once.
    """
    triples: List[FactorTriple] = []
    seen = set()
    for a in range(len(u) + 1):
        for k in range(len(u) - a + 1):
            if not _quotient_closed(u, a, k):
                continue
            c = u.letters[a:a + k]
            flipped = tuple(l.inverted() for l in reversed(c))
            vertex = _node_vertex(A, u, a)
            for b in range(len(v) - k + 1):
                if not _submodule_closed(v, b, k):
                    continue
                window = v.letters[b:b + k]
                for reverse, pattern in ((False, c), (True, flipped)):
                    if window != pattern:
                        continue
                    target_vertex = _node_vertex(A, v, b + k if reverse else b)
                    if target_vertex != vertex:
                        continue
                    triple = FactorTriple(c, vertex, a, b, reverse)
                    if triple.node_map in seen:
                        continue
                    seen.add(triple.node_map)
                    triples.append(triple)
    return triples


def _graph_map(Mu: FDModule, Mv: FDModule, triple: FactorTriple) -> GraphMap:
    K = Mu.field
    rows = {vertex: [[K.zero] * Mu.dims[vertex] for _ in range(Mv.dims[vertex])] for vertex in Mu.algebra.vertices}
    for source, target in triple.node_map:
        vertex, i = Mv.position(target)
        _, j = Mu.position(source)
        rows[vertex][i][j] = K.one
    matrices = {vertex: K.matrix(rows[vertex], Mv.dims[vertex], Mu.dims[vertex]) for vertex in rows}
    return GraphMap(triple, matrices)


def _flatten(Mu: FDModule, maps: Dict[str, DomainMatrix]) -> List:
    entries = []
    for vertex in Mu.algebra.vertices:
        for row in Mu.field.rows_of(maps[vertex]):
            entries.extend(row)
    return entries


def hom_basis(Mu: FDModule, Mv: FDModule, verify: bool = True) -> List[GraphMap]:
    """Graph maps M(u) -> M(v), checked against the linear-solve oracle.

    Raises:
        PreconditionError: If either module was not built as a string module
        ConsistencyError: If a map fails to commute, the maps are dependent, or the count
            disagrees with the oracle
    """
    if Mu.dim == 0 or Mv.dim == 0:
        return []
    if Mu.kind != "string" or Mv.kind != "string":
        raise PreconditionError("Graph-map bases are defined between string modules only")
    maps = [_graph_map(Mu, Mv, t) for t in admissible_triples(Mu.algebra, Mu.word, Mv.word)]
    if not verify:
        return maps
    for g in maps:
        if not is_homomorphism(Mu, Mv, g.matrices):
            raise ConsistencyError(f"Graph map {g.triple.text} does not commute with the arrows")
    total = sum(Mu.dims[v] * Mv.dims[v] for v in Mu.algebra.vertices)
    if Mu.field.rank([_flatten(Mu, g.matrices) for g in maps], total) != len(maps):
        raise ConsistencyError(f"Graph maps {Mu.word.text} -> {Mv.word.text} are linearly dependent")
    expected = hom_dimension_oracle(Mu, Mv)
    if expected != len(maps):
        raise ConsistencyError(f"Found {len(maps)} graph maps {Mu.word.text} -> {Mv.word.text}, "
                               f"but Hom has dimension {expected}")
    return maps


def hom_count(A, u: FiniteWord, v: FiniteWord, K=None) -> Tuple[int, int]:
    """``(number of admissible triples, oracle dimension)`` for M(u) and M(v)."""
    Mu, Mv = string_module(A, u, K), string_module(A, v, K)
    return len(admissible_triples(A, u, v)), hom_dimension_oracle(Mu, Mv)


@dataclass
class PointedMorphism:
    exists: bool
    matrices: Dict[str, DomainMatrix] = field(default_factory=dict)


def pointed_morphism_exists(N: FDModule, n: PointedElement, M: FDModule, m: PointedElement) -> PointedMorphism:
    """Solve for a homomorphism f: N -> M with f(n) = m.

    Raises:
        SideMismatchError: If n and m sit at different vertices
    """
    if n.vertex != m.vertex:
        raise SideMismatchError(f"Elements at {n.vertex} and {m.vertex} cannot be matched")
    K = N.field
    equations, offsets, total = hom_equations(N, M)
    rhs = [K.zero] * len(equations)
    vertex = n.vertex
    cols = N.dims[vertex]
    for i in range(M.dims[vertex]):
        row = [K.zero] * total
        for k in range(cols):
            row[offsets[vertex] + i * cols + k] = n.vector[k]
        equations.append(row)
        rhs.append(m.vector[i])
    solution = K.solve(equations, total, rhs)
    if solution is None:
        logger.debug("No morphism sends the point of %s to the target element", N.kind)
        return PointedMorphism(False)
    return PointedMorphism(True, unpack_hom(N, M, offsets, solution))
