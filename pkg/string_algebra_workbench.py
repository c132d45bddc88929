"""String algebra workbench: library facade and command line."""

import argparse
import json
import logging
import os
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from src.audit import Auditor
from src.bands import bridge_dot, bridge_quiver, enumerate_bands, is_domestic, normalize_band
from src.config import SessionConfig, load_config
from src.errors import InvalidWordError, PreconditionError, StringAlgebraError
from src.homs import hom_basis
from src.linalg import ExactField
from src.presentation import AlgebraPresentation, load_algebra, require_validated, validate_string_algebra
from src.reports import (AuditReport, BandsReport, BridgeReport, CoverModel, DescriptorModel, DomesticReport,
                         HomReport, HomogeneityReport, ModuleReport, OracleModel, PPReport, RingelListReport,
                         TruncationReport, ValidationReport, VerdictReport, ViolationModel, WordOfReport,
                         report_schemas)
from src.repmod import (FDModule, PointedElement, band_module, both_div, hom_dimension_oracle, is_homogeneous,
                        left_div, pp_subspace, right_div, string_module, word_of)
from src.ringel import RingelAnalyzer, pointed_truncation, string_diagram_dot, truncate
from src.words import (FiniteWord, HPartition, Letter, compute_h_partition, make_word, parse_letters,
                       parse_two_sided, parse_word)

logger = logging.getLogger(__name__)

BOUND_KEYS = {
    "word": "word_bound",
    "prefix": "prefix_bound",
    "middle": "middle_bound",
    "bridge": "bridge_bound",
    "levels": "max_levels",
    "window": "stabilization_window",
    "samples": "samples",
}


class UsageError(Exception):
    """Malformed command-line input; reported with exit code 2."""


def _flip(letters: Sequence[Letter]) -> Tuple[Letter, ...]:
    return tuple(l.inverted() for l in reversed(letters))


class StringAlgebraWorkbench:
    """Facade over the workbench modules; every method returns a report model."""

    def __init__(self, config: Optional[SessionConfig] = None):
        """Initialize the workbench.
        Args:
            config: Session configuration; defaults come from the environment
        """
        self.config = config or load_config()
        self.field = ExactField(self.config.characteristic)

    # loading

    def load(self, path: str, validate: bool = True) -> AlgebraPresentation:
        """Read an algebra file.

        Raises:
            UsageError: If the file is missing or empty
            StringAlgebraError: If it does not parse, or (with ``validate``) is not a string algebra
        """
        if not os.path.isfile(path):
            raise UsageError(f"No such algebra file: {path}")
        with open(path, encoding="utf-8") as f:
            blank = not f.read().strip()
        if blank:
            raise UsageError(f"Algebra file {path} is empty")
        A = load_algebra(path)
        return require_validated(A) if validate else A

    def partition(self, A: AlgebraPresentation) -> HPartition:
        return compute_h_partition(A, self.config.partition_override)

    def _string_word(self, A: AlgebraPresentation, text: str, anchor: Optional[str] = None) -> FiniteWord:
        w = parse_word(A, text, anchor)
        if w.is_infinite:
            raise PreconditionError(f"{text} is infinite; a finite word is needed here")
        return w

    def _formula_words(self, A: AlgebraPresentation, text: str, anchor: str) -> Tuple[FiniteWord, FiniteWord]:
        """Split ``C^-1 . D`` into the finite words C (in H_-1) and D (in H_1)."""
        if text.count(".") != 1:
            raise UsageError(f"Formula {text!r} needs exactly one '.' between C^-1 and D")
        left_text, right_text = text.split(".")
        C = make_word(A, list(_flip(parse_letters(left_text))), anchor, -1)
        D = make_word(A, list(parse_letters(right_text)), anchor, 1)
        return C, D

    def pointed_module(self,
                       A: AlgebraPresentation,
                       word: Optional[str] = None,
                       band: Optional[str] = None,
                       parameter: str = "1",
                       layers: int = 1,
                       node: Optional[str] = None,
                       vertex: Optional[str] = None,
                       vector: Optional[str] = None) -> Tuple[FDModule, PointedElement]:
        """Build a string or band module and pick an element of it.

        ``node`` names a basis element (``3`` for a string module, ``3:1`` for node 3 in layer 1
        of a band module); otherwise ``vertex`` and comma-separated ``vector`` coordinates are used.
        """
        if (word is None) == (band is None):
            raise UsageError("Give exactly one of --word and --band")
        if word is not None:
            M = string_module(A, self._string_word(A, word), self.field)
        else:
            C = normalize_band(A, parse_letters(band))
            if C is None:
                raise InvalidWordError(f"{band} is not a band")
            M = band_module(A, C, self.field.parse(parameter), layers, self.field)
        if node is not None:
            if M.kind == "band":
                position, _, layer = node.partition(":")
                return M, M.element((int(position), int(layer or 1)))
            return M, M.element(int(node))
        if vertex is None or vector is None:
            raise UsageError("Give --node, or --vertex together with --vector")
        values = [self.field.parse(x) for x in vector.split(",")]
        return M, PointedElement(M, vertex, values)

    def _vector(self, v) -> List[str]:
        return [self.field.format(x) for x in v]

    # algebra level

    def validate(self, A: AlgebraPresentation) -> ValidationReport:
        result = validate_string_algebra(A)
        return ValidationReport(algebra=A.name,
                                ok=result.ok,
                                violations=[ViolationModel(axiom=v.axiom, vertex=v.vertex, arrows=list(v.arrows),
                                                           message=v.message) for v in result.violations],
                                nonzero_compositions=[list(pair) for pair in result.nonzero_compositions])

    def bands(self, A: AlgebraPresentation) -> BandsReport:
        found = enumerate_bands(A, self.config.max_len)
        domestic = is_domestic(A)
        return BandsReport(algebra=A.name,
                           bands=[b.text for b in found.bands],
                           max_len=found.max_len,
                           truncated=found.truncated,
                           domestic=domestic.domestic,
                           n=domestic.n)

    def domestic(self, A: AlgebraPresentation) -> DomesticReport:
        result = is_domestic(A)
        witness = [[l.token for l in cycle] for cycle in result.witness] if result.witness else []
        return DomesticReport(algebra=A.name, domestic=result.domestic, n=result.n, witness=witness,
                              text=result.text)

    def bridge(self, A: AlgebraPresentation) -> Tuple[BridgeReport, str]:
        quiver = bridge_quiver(A, self.config.bridge_bound)
        report = BridgeReport(algebra=A.name,
                              bands=[b.text for b in quiver.elements],
                              covers=[CoverModel(lower=c.lower.text, upper=c.upper.text, witness=c.witness_text)
                                      for c in quiver.covers],
                              bound=quiver.bound,
                              stable=quiver.stable)
        return report, bridge_dot(quiver)

    # modules

    def module(self, A: AlgebraPresentation, word: Optional[str] = None, band: Optional[str] = None,
               parameter: str = "1", layers: int = 1) -> ModuleReport:
        if (word is None) == (band is None):
            raise UsageError("Give exactly one of --word and --band")
        if word is not None:
            M = string_module(A, self._string_word(A, word), self.field)
            description = f"M({M.word.text})"
        else:
            C = normalize_band(A, parse_letters(band))
            if C is None:
                raise InvalidWordError(f"{band} is not a band")
            M = band_module(A, C, self.field.parse(parameter), layers, self.field)
            description = f"M({C.text}, {parameter}, {layers})"
        document = M.to_json()
        return ModuleReport(algebra=A.name, kind=M.kind, description=description, field=self.field.name,
                            dims=document["dims"], matrices=document["matrices"],
                            relations_vanish=M.relations_vanish())

    def pp(self, A: AlgebraPresentation, formula: str, M: FDModule, m: Optional[PointedElement] = None,
           vertex: Optional[str] = None) -> PPReport:
        """Solution space of ``(C^-1.D)`` in ``e_S M``, and whether m satisfies it."""
        H = self.partition(A)
        anchor = m.vertex if m is not None else vertex
        if anchor is None:
            raise UsageError("pp needs an element or a --vertex")
        C, D = self._formula_words(A, formula, anchor)
        if C.is_empty and not D.is_empty:
            phi = right_div(A, H, D)
        elif D.is_empty and not C.is_empty:
            phi = left_div(A, H, C)
        else:
            phi = both_div(A, H, C, D)
        space = pp_subspace(M, H, phi)
        return PPReport(algebra=A.name, formula=phi.text, vertex=anchor, partition=H.to_tokens(),
                        dimension=space.dim, ambient=space.ambient,
                        basis=[self._vector(b) for b in space.basis],
                        element=self._vector(m.vector) if m is not None else None,
                        satisfied=space.contains(m.vector) if m is not None else None)

    def word_of(self, A: AlgebraPresentation, M: FDModule, m: PointedElement) -> WordOfReport:
        H = self.partition(A)
        w = word_of(M, H, m)
        return WordOfReport(algebra=A.name, vertex=m.vertex, element=self._vector(m.vector),
                            partition=H.to_tokens(), left=w.left.text, right=w.right.text, word=w.text)

    def homogeneity(self, A: AlgebraPresentation, M: FDModule, m: PointedElement) -> HomogeneityReport:
        H = self.partition(A)
        result = is_homogeneous(M, H, m)
        return HomogeneityReport(algebra=A.name, vertex=m.vertex, element=self._vector(m.vector),
                                 partition=H.to_tokens(), word=result.word.text, homogeneous=result.homogeneous,
                                 witness=self._vector(result.witness) if result.witness is not None else None)

    def hom(self, A: AlgebraPresentation, source: str, target: str) -> HomReport:
        u, v = self._string_word(A, source), self._string_word(A, target)
        Mu, Mv = string_module(A, u, self.field), string_module(A, v, self.field)
        maps = hom_basis(Mu, Mv)
        return HomReport(algebra=A.name, source=u.text, target=v.text,
                         triples=[g.triple.text for g in maps],
                         count=len(maps), oracle_count=hom_dimension_oracle(Mu, Mv))

    # Ringel's list

    def _analyzer(self, A: AlgebraPresentation) -> Tuple[RingelAnalyzer, HPartition]:
        H = self.partition(A)
        return RingelAnalyzer(A, H, self.field, self.config.stabilization_window, self.config.max_levels), H

    def ringel_list(self, A: AlgebraPresentation) -> RingelListReport:
        analyzer, H = self._analyzer(A)
        entries = analyzer.enumerate_ringel_list(self.config.prefix_bound, self.config.middle_bound,
                                                 self.config.lambda_samples)
        return RingelListReport(
            algebra=A.name, partition=H.to_tokens(),
            prefix_bound=self.config.prefix_bound, middle_bound=self.config.middle_bound,
            lambda_samples=[self.field.format(x) for x in self.field.lambda_values(self.config.lambda_samples)],
            entries=[DescriptorModel(variant=e.variant, text=e.text, shapes=list(e.shapes),
                                     band=e.band.text if e.band is not None else None, parameter=e.parameter)
                     for e in entries])

    def ringel_truncate(self, A: AlgebraPresentation, text: str, level: int) -> TruncationReport:
        if "." in text:
            cut = pointed_truncation(A, parse_two_sided(A, self.partition(A), text), level)
            word, node = cut.word, cut.node
        else:
            w = parse_word(A, text)
            word, node = (truncate(A, w, level) if w.is_infinite else w), 0
        return TruncationReport(algebra=A.name, word=text, level=level, truncation=word.text, anchor_node=node,
                                diagram=string_diagram_dot(A, word, node))

    def _oracle_model(self, result) -> OracleModel:
        return OracleModel(verdict=result.verdict.value, levels=result.levels, answers=result.answers,
                           stable=result.stable)

    def ringel_pp(self, A: AlgebraPresentation, text: str, formula: str, oracle: bool = False) -> VerdictReport:
        analyzer, H = self._analyzer(A)
        q = parse_two_sided(A, H, text)
        C, D = self._formula_words(A, formula, q.anchor)
        verdict = analyzer.pp_member(q, C, D)
        phi = psi = None
        if q.left.is_infinite and q.right.is_infinite and not q.periodic:
            basic = analyzer.ziegler_basic_open(q)
            phi, psi = basic.phi.text, basic.psi.text
        return VerdictReport(algebra=A.name, word=q.text, partition=H.to_tokens(), formula=both_div(A, H, C, D).text,
                             verdict=verdict.value, phi=phi, psi=psi,
                             oracle=self._oracle_model(analyzer.word_oracle(q, C, D)) if oracle else None)

    def ringel_classify(self, A: AlgebraPresentation, text: str, L: FDModule, l: PointedElement,
                        oracle: bool = False) -> VerdictReport:
        analyzer, H = self._analyzer(A)
        q = parse_two_sided(A, H, text)
        basic = analyzer.ziegler_basic_open(q)
        result = analyzer.classify_formula(q, L, l, basic)
        return VerdictReport(algebra=A.name, word=q.text, partition=H.to_tokens(),
                             formula=f"free realization of {self._vector(l.vector)} at {l.vertex}",
                             verdict=result.verdict.value, phi=basic.phi.text, psi=basic.psi.text,
                             oracle=self._oracle_model(analyzer.truncation_oracle(q, L, l)) if oracle else None)

    # sweeps

    def audit(self, A: AlgebraPresentation) -> AuditReport:
        return Auditor(A, self.partition(A), self.config).run()


# command line


def _key_values(text: Optional[str], option: str) -> Dict[str, str]:
    if not text:
        return {}
    values = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"{option} expects key=value pairs, got {item!r}")
        values[key.strip()] = value.strip()
    return values


def _config_from_args(args) -> SessionConfig:
    overrides = {"field": args.field, "max_len": args.max_len, "seed": args.seed, "output_format": args.format}
    try:
        for key, value in _key_values(args.bounds, "--bounds").items():
            if key not in BOUND_KEYS:
                raise UsageError(f"Unknown bound {key!r}; expected one of {', '.join(sorted(BOUND_KEYS))}")
            overrides[BOUND_KEYS[key]] = int(value)
        partition = {token: int(side) for token, side in _key_values(args.partition, "--partition").items()}
    except ValueError as e:
        raise UsageError(f"Error reading bounds: {str(e)}")
    if partition:
        overrides["partition_override"] = partition
    overrides["show_progress"] = args.progress or None
    return load_config(**overrides)


def _add_module_options(parser: argparse.ArgumentParser, pointed: bool = True, word_flag: str = "--word") -> None:
    parser.add_argument(word_flag, dest="module_word", help="string module M(w)")
    parser.add_argument("--band", help="band module M(C, lambda, layers)")
    parser.add_argument("--lambda", dest="parameter", default="1", help="band parameter")
    parser.add_argument("--layers", type=int, default=1, help="Jordan block size of a band module")
    if pointed:
        parser.add_argument("--node", help="basis element: node index, or node:layer for band modules")
        parser.add_argument("--vertex", help="vertex of an element given by --vector")
        parser.add_argument("--vector", help="comma-separated coordinates in e_S M")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="string_algebra_workbench",
                                     description="Strings, bands and pp-types over string algebras.")
    parser.add_argument("--field", help="QQ or GF(p)")
    parser.add_argument("--max-len", type=int, help="longest band enumerated")
    parser.add_argument("--bounds", help="comma-separated word=, prefix=, middle=, bridge=, levels=, window=, samples=")
    parser.add_argument("--seed", type=int, help="seed of the property sweeps")
    parser.add_argument("--format", choices=["json", "text", "dot"], help="output format")
    parser.add_argument("--partition", help="H-partition override, e.g. b=1,a^-1=-1")
    parser.add_argument("--progress", action="store_true", help="show progress bars on sweeps")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    for name in ("validate", "bands", "domestic", "audit"):
        commands.add_parser(name).add_argument("algebra")
    bridge = commands.add_parser("bridge")
    bridge.add_argument("algebra")
    bridge.add_argument("--dot", action="store_true", help="print the covering relation as DOT")
    module = commands.add_parser("module")
    module.add_argument("algebra")
    _add_module_options(module, pointed=False)
    pp = commands.add_parser("pp")
    pp.add_argument("algebra")
    pp.add_argument("formula", help="C^-1 . D, e.g. 'a b^-1 . b'")
    _add_module_options(pp)
    for name in ("word-of", "homog"):
        sub = commands.add_parser(name)
        sub.add_argument("algebra")
        _add_module_options(sub)
    hom = commands.add_parser("hom")
    hom.add_argument("algebra")
    hom.add_argument("source")
    hom.add_argument("target")

    ringel = commands.add_parser("ringel")
    actions = ringel.add_subparsers(dest="action", required=True)
    actions.add_parser("list").add_argument("algebra")
    cut = actions.add_parser("truncate")
    cut.add_argument("algebra")
    cut.add_argument("word")
    cut.add_argument("--level", type=int, default=1)
    cut.add_argument("--dot", action="store_true", help="print the string diagram as DOT")
    member = actions.add_parser("pp")
    member.add_argument("algebra")
    member.add_argument("word")
    member.add_argument("formula")
    member.add_argument("--oracle", action="store_true", help="also run the truncation oracle")
    classify = actions.add_parser("classify")
    classify.add_argument("algebra")
    classify.add_argument("word")
    _add_module_options(classify, word_flag="--string")
    classify.add_argument("--oracle", action="store_true", help="also run the truncation oracle")

    commands.add_parser("schema")
    return parser


def _render(report, output_format: str) -> str:
    if output_format == "json":
        return report.model_dump_json(indent=2)
    if isinstance(report, DomesticReport):
        return report.text
    lines = []
    for key, value in report.model_dump().items():
        if isinstance(value, list):
            lines.append(f"{key}:")
            lines.extend(f"  {json.dumps(item) if isinstance(item, (dict, list)) else item}" for item in value)
        elif isinstance(value, dict):
            lines.append(f"{key}: {json.dumps(value)}")
        elif value is not None:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


def _dispatch(workbench: StringAlgebraWorkbench, args) -> Tuple[str, int]:
    fmt = workbench.config.output_format
    if args.command == "schema":
        return json.dumps(report_schemas(), indent=2, sort_keys=True), 0

    A = workbench.load(args.algebra, validate=args.command != "validate")
    if args.command == "validate":
        report = workbench.validate(A)
        return _render(report, fmt), 0 if report.ok else 1
    if args.command == "bands":
        return _render(workbench.bands(A), fmt), 0
    if args.command == "domestic":
        return _render(workbench.domestic(A), fmt), 0
    if args.command == "bridge":
        report, dot = workbench.bridge(A)
        return (dot.rstrip("\n") if args.dot or fmt == "dot" else _render(report, fmt)), 0
    if args.command == "module":
        return _render(workbench.module(A, args.module_word, args.band, args.parameter, args.layers), fmt), 0
    if args.command == "hom":
        return _render(workbench.hom(A, args.source, args.target), fmt), 0
    if args.command == "audit":
        report = workbench.audit(A)
        return _render(report, fmt), 0 if report.passed else 1

    if args.command in ("pp", "word-of", "homog"):
        if args.command == "pp" and args.node is None and args.vector is None:
            M, _ = workbench.pointed_module(A, args.module_word, args.band, args.parameter, args.layers, node="0")
            return _render(workbench.pp(A, args.formula, M, vertex=args.vertex), fmt), 0
        M, m = workbench.pointed_module(A, args.module_word, args.band, args.parameter, args.layers,
                                        args.node, args.vertex, args.vector)
        if args.command == "pp":
            return _render(workbench.pp(A, args.formula, M, m), fmt), 0
        if args.command == "word-of":
            return _render(workbench.word_of(A, M, m), fmt), 0
        return _render(workbench.homogeneity(A, M, m), fmt), 0

    if args.action == "list":
        return _render(workbench.ringel_list(A), fmt), 0
    if args.action == "truncate":
        report = workbench.ringel_truncate(A, args.word, args.level)
        if args.dot or fmt == "dot":
            return report.diagram.rstrip("\n"), 0
        return _render(report, fmt), 0
    if args.action == "pp":
        return _render(workbench.ringel_pp(A, args.word, args.formula, args.oracle), fmt), 0
    L, l = workbench.pointed_module(A, args.module_word, args.band, args.parameter, args.layers,
                                    args.node, args.vertex, args.vector)
    return _render(workbench.ringel_classify(A, args.word, L, l, args.oracle), fmt), 0


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; 0 on success, 1 on domain errors or failed checks, 2 on usage errors."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        workbench = StringAlgebraWorkbench(_config_from_args(args))
        if args.command != "schema" and workbench.config.output_format == "dot" and \
                args.command != "bridge" and getattr(args, "action", None) != "truncate":
            raise UsageError("--format dot is only available for bridge and ringel truncate")
        output, code = _dispatch(workbench, args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        print(parser.format_usage(), file=sys.stderr, end="")
        return 2
    except StringAlgebraError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(output)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
