"""Property suites run by the ``audit`` subcommand."""

import logging
import random
from collections import defaultdict
from typing import Callable, Dict, List

from tqdm import tqdm

from .bands import band_facts_audit, bridge_quiver, enumerate_bands, invert_band, is_domestic, quotient_to_band
from .config import SessionConfig
from .errors import StringAlgebraError
from .homs import hom_basis
from .linalg import ExactField
from .presentation import AlgebraPresentation
from .reports import AuditReport, SuiteResult
from .repmod import (PointedElement, divide, is_homogeneous, right_word, string_module, word_of)
from .words import (FiniteWord, HPartition, Order, append, compare, enumerate_words, extension, make_one_sided,
                    side_of)

logger = logging.getLogger(__name__)


class Auditor:
    """Handler for the property suites over one algebra."""

    def __init__(self, algebra: AlgebraPresentation, partition: HPartition, config: SessionConfig):
        """Initialize the auditor.
        Args:
            algebra: Validated presentation
            partition: H-partition all order-sensitive checks use
            config: Bounds, sample size, seed and progress settings
        """
        self.algebra = algebra
        self.partition = partition
        self.config = config
        self.field = ExactField(config.characteristic)
        self.domestic = is_domestic(algebra)
        self.words = [w for w in enumerate_words(algebra, config.word_bound)]

    def _progress(self, items, name: str):
        return tqdm(items, desc=name, disable=not self.config.show_progress)

    def _rng(self, name: str) -> random.Random:
        return random.Random(f"{self.config.seed}:{name}")

    def _nonempty_words(self) -> List[FiniteWord]:
        return [w for w in self.words if w.letters]

    def _chains(self) -> Dict[tuple, List[FiniteWord]]:
        chains = defaultdict(list)
        for w in self.words:
            chains[(w.anchor, side_of(self.algebra, self.partition, w))].append(w)
        return chains

    def _run(self, name: str, cases, check: Callable) -> SuiteResult:
        """Run ``check`` on every case, logging failures instead of aborting."""
        result = SuiteResult(name=name, passed=True)
        error_log = []
        for case in self._progress(cases, name):
            result.checked += 1
            try:
                problem = check(case)
            except StringAlgebraError as e:
                problem = f"error: {str(e)}"
            if problem:
                error_log.append(problem)
        if error_log:
            logger.warning("Warning: suite %s failed on %d of %d cases", name, len(error_log), result.checked)
        result.failures = error_log
        result.passed = not error_log
        return result

    def _skip(self, name: str, reason: str) -> SuiteResult:
        return SuiteResult(name=name, passed=True, skipped=True, reason=reason)

    # word suites

    def word_order(self) -> SuiteResult:
        A, H = self.algebra, self.partition
        rng = self._rng("word_order")
        chains = [chain for chain in self._chains().values() if len(chain) >= 2]
        triples = []
        for _ in range(self.config.samples if chains else 0):
            chain = rng.choice(chains)
            triples.append(tuple(rng.choice(chain) for _ in range(3)))

        def check(triple):
            a, b, c = triple
            ab, ba = compare(A, H, a, b), compare(A, H, b, a)
            if ab != -ba:
                return f"antisymmetry fails for {a.text}, {b.text}"
            if (ab == Order.EQ) != (a.key == b.key):
                return f"{a.text} and {b.text} compare equal but differ"
            bc, ac = compare(A, H, b, c), compare(A, H, a, c)
            if ab <= Order.EQ and bc <= Order.EQ and ac > Order.EQ:
                return f"transitivity fails for {a.text} <= {b.text} <= {c.text}"
            for inverse in (False, True):
                letter = extension(A, H, a, inverse)
                if letter is not None:
                    longer = append(A, a, letter)
                    expected = Order.GT if inverse else Order.LT
                    if compare(A, H, a, longer) != expected:
                        return f"extending {a.text} by {letter.token} moves the wrong way"
            return None

        return self._run("word_order", triples, check)

    def canonicalization(self) -> SuiteResult:
        A, H = self.algebra, self.partition
        bands = enumerate_bands(A, self.config.max_len).bands
        cases = [(p, rotation) for band in bands for rotation in band.rotations()
                 for p in self._nonempty_words() if len(p) <= self.config.prefix_bound + 1]

        def check(case):
            prefix, period = case
            if prefix.end != period[0].left(A):
                return None
            try:
                w = make_one_sided(A, prefix.letters, period)
            except StringAlgebraError:
                return None
            again = make_one_sided(A, w.prefix_letters, w.period)
            if again != w:
                return f"canonical form of {w.text} is not stable"
            longer = make_one_sided(A, prefix.letters + period * 3, period)
            if compare(A, H, w, longer) != Order.EQ:
                return f"{w.text} differs from its own longer expansion"
            return None

        return self._run("canonicalization", cases, check)

    # band suites

    def band_facts(self) -> SuiteResult:
        if not self.domestic.domestic:
            return self._skip("band_facts", "non-domestic")
        report = band_facts_audit(self.algebra, max(self.config.word_bound, 12))
        return SuiteResult(name="band_facts", passed=report.passed, checked=sum(report.checked.values()),
                           failures=report.counterexamples)

    def bridge_antisymmetry(self) -> SuiteResult:
        if not self.domestic.domestic:
            return self._skip("bridge_antisymmetry", "non-domestic")

        def check(bound):
            quiver = bridge_quiver(self.algebra, bound)
            both = [f"{c.text} / {d.text}" for c, d in quiver.relations if (d, c) in quiver.relations]
            if both:
                return f"bands bridge both ways: {', '.join(both)}"
            if not quiver.stable:
                return f"bridge relation still changing at bound {quiver.bound}"
            return None

        return self._run("bridge_antisymmetry", [self.config.bridge_bound], check)

    def band_quotients(self) -> SuiteResult:
        if not self.domestic.domestic:
            return self._skip("band_quotients", "non-domestic")
        A = self.algebra

        def check(band):
            quotient = quotient_to_band(A, band)
            allowed = {band, invert_band(A, band)}
            extra = [b.text for b in enumerate_bands(quotient, self.config.max_len).bands if b not in allowed]
            if extra:
                return f"quotient to {band.text} has foreign bands {', '.join(extra)}"
            return None

        return self._run("band_quotients", list(self.domestic.bands), check)

    # module suites

    def _basis_cases(self):
        for w in self._nonempty_words():
            M = string_module(self.algebra, w, self.field)
            for node in range(len(w) + 1):
                yield M, M.element(node)

    def leftmost_word(self) -> SuiteResult:
        A, H = self.algebra, self.partition
        cases = [w for w in self._nonempty_words() if side_of(A, H, w) == 1]

        def check(w):
            M = string_module(A, w, self.field)
            found = right_word(M, H, M.element(0))
            if found.is_infinite or compare(A, H, found, w) != Order.EQ:
                return f"leftmost element of M({w.text}) has right word {found.text}"
            return None

        return self._run("leftmost_word", cases, check)

    def triangle_inequality(self) -> SuiteResult:
        A, H, K = self.algebra, self.partition, self.field
        rng = self._rng("triangle_inequality")
        words = self._nonempty_words()
        cases = []
        for _ in range(self.config.samples if words else 0):
            M = string_module(A, rng.choice(words), K)
            vertex = rng.choice([v for v in A.vertices if M.dims[v]])
            vectors = [tuple(K.random_element(rng) for _ in range(M.dims[vertex])) for _ in range(2)]
            cases.append((M, vertex, vectors))

        def check(case):
            M, vertex, (x, y) = case
            total = K.add(x, y)
            if K.is_zero_vector(x) or K.is_zero_vector(y) or K.is_zero_vector(total):
                return None
            v1 = right_word(M, H, PointedElement(M, vertex, x))
            v2 = right_word(M, H, PointedElement(M, vertex, y))
            v = right_word(M, H, PointedElement(M, vertex, total))
            low = v1 if compare(A, H, v1, v2) <= Order.EQ else v2
            order = compare(A, H, v, low)
            if order == Order.LT:
                return f"v(m1 + m2) = {v.text} lies below min({v1.text}, {v2.text})"
            if compare(A, H, v1, v2) != Order.EQ and order != Order.EQ:
                return f"v(m1 + m2) = {v.text} differs from min({v1.text}, {v2.text})"
            return None

        return self._run("triangle_inequality", cases, check)

    def homogeneity(self) -> SuiteResult:
        H = self.partition

        def check(case):
            M, m = case
            if not is_homogeneous(M, H, m).homogeneous:
                return f"basis element {m.vector} of M({M.word.text}) is not homogeneous"
            return None

        return self._run("homogeneity", list(self._basis_cases()), check)

    def division(self) -> SuiteResult:
        H = self.partition

        def check(case):
            M, m = case
            v = word_of(M, H, m).right
            first = v.letter_at(0)
            if first is None:
                return None
            divide(M, H, m, first)
            return None

        return self._run("division", list(self._basis_cases()), check)

    def hom_oracle(self) -> SuiteResult:
        A = self.algebra
        rng = self._rng("hom_oracle")
        words = self._nonempty_words()
        pairs = [(rng.choice(words), rng.choice(words)) for _ in range(self.config.samples if words else 0)]

        def check(pair):
            u, v = pair
            Mu, Mv = string_module(A, u, self.field), string_module(A, v, self.field)
            hom_basis(Mu, Mv)
            return None

        return self._run("hom_oracle", pairs, check)

    def run(self) -> AuditReport:
        suites = [self.band_facts(), self.band_quotients(), self.bridge_antisymmetry(), self.canonicalization(),
                  self.division(), self.hom_oracle(), self.homogeneity(), self.leftmost_word(),
                  self.triangle_inequality(), self.word_order()]
        suites.sort(key=lambda s: s.name)
        return AuditReport(algebra=self.algebra.name,
                           seed=self.config.seed,
                           field=self.field.name,
                           partition=self.partition.to_tokens(),
                           suites=suites,
                           passed=all(s.passed for s in suites))
