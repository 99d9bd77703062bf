"""
Model Format Module

Line-oriented text formats for event structures (.es) and nets (.net), tokenized
with a lark grammar. A '#' that starts a token opens a comment running to the end
of the line. Serialization is canonical: sections in a fixed order, entries
sorted, one trailing newline.
"""

import re
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Set, Tuple, Union
import logging

from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput

from errors import ModelParseError
from event_structure import EventStructureCore, ReversiblePes
from inhibitor_net import InhibitorNet
from net_classes import BackwardPartition

logger = logging.getLogger(__name__)

ES_KINDS = ("ppes", "pes", "rpes")
NET_KINDS = ("ipt", "pcn", "cn", "on", "rcn")
ES_SECTIONS = ("kind", "events", "undoable", "cause", "conflict", "revcause", "prevent")
NET_SECTIONS = ("kind", "places", "transitions", "backward", "arc", "inhibit", "marking")

EVENT_NAME = re.compile(r"[A-Za-z0-9_]+")
NET_NAME = re.compile(r"[A-Za-z0-9_~*,(){}][A-Za-z0-9_~*#,(){}]*")


class ParsedEs(NamedTuple):
    kind: str
    structure: Union[EventStructureCore, ReversiblePes]


class ParsedNet(NamedTuple):
    kind: str
    net: InhibitorNet
    backward: Optional[List[str]]

    def partition(self) -> Optional[BackwardPartition]:
        """Declared partition, or None when the file has no backward section"""
        if self.backward is None:
            return None
        return BackwardPartition.from_backward(self.net, self.backward)


class _Line(NamedTuple):
    number: int
    section: str
    tokens: List[Tuple[str, int]]
    section_column: int


GRAMMAR = r"""
start: _item* line?
_item: line? _NL
line: SECTION ":" VALUE*

SECTION: /[A-Za-z_]+/
VALUE: /[^\s:#][^\s]*/
COMMENT: /#[^\n]*/
_NL: /\n/

%ignore /[ \t\r]+/
%ignore COMMENT
"""

_PARSER = Lark(GRAMMAR, parser="lalr")


class _LineCollector(Transformer):
    def start(self, items):
        return list(items)

    def line(self, items):
        section, *values = items
        return _Line(section.line, str(section), [(str(v), v.column) for v in values], section.column)


def _syntax_error(text: str, error: UnexpectedInput) -> ModelParseError:
    raw_lines = text.splitlines()
    number = error.line if getattr(error, "line", -1) > 0 else len(raw_lines)
    raw = raw_lines[number - 1] if 0 < number <= len(raw_lines) else ""
    words = raw.split()
    column = len(raw) - len(raw.lstrip()) + 1
    return ModelParseError("expected 'section: values'", number, column, words[0] if words else "")


def _tokenize(text: str, sections: Tuple[str, ...]) -> List[_Line]:
    try:
        lines = _LineCollector().transform(_PARSER.parse(text))
    except UnexpectedInput as e:
        raise _syntax_error(text, e) from None
    for line in lines:
        if line.section not in sections:
            raise ModelParseError(f"unknown section '{line.section}'", line.number, line.section_column,
                                  line.section)
    return lines


def _read_kind(lines: List[_Line], kinds: Tuple[str, ...]) -> str:
    if not lines or lines[0].section != "kind":
        number = lines[0].number if lines else 1
        raise ModelParseError("the first section must be 'kind:'", number, 1, lines[0].section if lines else "")
    first = lines[0]
    if len(first.tokens) != 1 or first.tokens[0][0] not in kinds:
        token, column = first.tokens[0] if first.tokens else ("", first.section_column)
        raise ModelParseError(f"kind must be one of {', '.join(kinds)}", first.number, column, token)
    return first.tokens[0][0]


def _expect_names(line: _Line, pattern: "re.Pattern[str]") -> None:
    for token, column in line.tokens:
        if not pattern.fullmatch(token):
            raise ModelParseError("invalid name", line.number, column, token)


def _expect_pair(line: _Line) -> Tuple[Tuple[str, int], Tuple[str, int]]:
    if len(line.tokens) != 2:
        token, column = line.tokens[2] if len(line.tokens) > 2 else ("", line.section_column)
        raise ModelParseError(f"'{line.section}:' takes exactly two names", line.number, column, token)
    return line.tokens[0], line.tokens[1]


def _declare(line: _Line, declared: Set[str], others: Set[str]) -> List[str]:
    names = []
    for token, column in line.tokens:
        if token in declared or token in others:
            raise ModelParseError("duplicate declaration", line.number, column, token)
        declared.add(token)
        names.append(token)
    return names


def _require(token: str, column: int, line: _Line, known: Set[str], what: str) -> None:
    if token not in known:
        raise ModelParseError(f"undeclared {what}", line.number, column, token)


def parse_es(text: str) -> ParsedEs:
    """
    Parse an event structure file

    Raises:
        ModelParseError: On syntax errors, duplicate declarations, undeclared
            names and sections not allowed by the declared kind
    """
    lines = _tokenize(text, ES_SECTIONS)
    kind = _read_kind(lines, ES_KINDS)
    events: Set[str] = set()
    undoable: Set[str] = set()
    pairs: Dict[str, List[Tuple[str, str]]] = {section: [] for section in ("cause", "conflict", "revcause", "prevent")}
    seen_sections: Set[str] = set()
    seen_pairs: Set[Tuple[str, str, str]] = set()

    for line in lines[1:]:
        if line.section == "kind":
            raise ModelParseError("duplicate declaration", line.number, line.section_column, "kind")
        if kind != "rpes" and line.section in ("undoable", "revcause", "prevent"):
            raise ModelParseError(f"section not allowed in a {kind} file", line.number, line.section_column,
                                  line.section)
        _expect_names(line, EVENT_NAME)
        if line.section in ("events", "undoable"):
            if line.section in seen_sections:
                raise ModelParseError("duplicate declaration", line.number, line.section_column, line.section)
            seen_sections.add(line.section)
            if line.section == "events":
                _declare(line, events, set())
            else:
                for token, column in line.tokens:
                    _require(token, column, line, events, "event")
                    if token in undoable:
                        raise ModelParseError("duplicate declaration", line.number, column, token)
                    undoable.add(token)
            continue

        (first, first_col), (second, second_col) = _expect_pair(line)
        _require(first, first_col, line, events, "event")
        if line.section in ("revcause", "prevent"):
            _require(second, second_col, line, undoable, "undoable event")
        else:
            _require(second, second_col, line, events, "event")
        key = (first, second) if line.section != "conflict" else tuple(sorted((first, second)))
        if (line.section, *key) in seen_pairs:
            raise ModelParseError("duplicate declaration", line.number, first_col, first)
        seen_pairs.add((line.section, *key))
        pairs[line.section].append((first, second))

    core = EventStructureCore(events, pairs["cause"], pairs["conflict"])
    if kind == "rpes":
        structure: Union[EventStructureCore, ReversiblePes] = ReversiblePes(
            core, undoable, pairs["revcause"], pairs["prevent"])
    else:
        structure = core
    logger.debug(f"Parsed {kind} with {len(events)} events")
    return ParsedEs(kind, structure)


def serialize_es(structure: Union[EventStructureCore, ReversiblePes], kind: Optional[str] = None) -> str:
    """Canonical text of an event structure"""
    if isinstance(structure, ReversiblePes):
        kind, core = "rpes", structure.core
    else:
        kind, core = kind or "ppes", structure
    lines = [f"kind: {kind}", _section("events", core.events)]
    if isinstance(structure, ReversiblePes):
        lines.append(_section("undoable", sorted(structure.undoable)))
    lines += [f"cause: {a} {b}" for a, b in sorted(core.causality)]
    lines += [f"conflict: {a} {b}" for a, b in sorted(core.conflict)]
    if isinstance(structure, ReversiblePes):
        lines += [f"revcause: {e} {u}" for e, u in sorted(structure.rev_causality)]
        lines += [f"prevent: {e} {u}" for e, u in sorted(structure.prevention)]
    return "\n".join(lines) + "\n"


def _section(name: str, items) -> str:
    items = list(items)
    return f"{name}: {' '.join(items)}" if items else f"{name}:"


def parse_net(text: str) -> ParsedNet:
    """
    Parse a net file; arc direction follows from which end is a place

    Raises:
        ModelParseError: On syntax errors, duplicate declarations, undeclared
            names and sections not allowed by the declared kind
    """
    lines = _tokenize(text, NET_SECTIONS)
    kind = _read_kind(lines, NET_KINDS)
    places: Set[str] = set()
    transitions: Set[str] = set()
    backward: Optional[List[str]] = None
    flow: List[Tuple[str, str]] = []
    inhibit: List[Tuple[str, str]] = []
    marking: List[str] = []
    seen_sections: Set[str] = set()
    seen_pairs: Set[Tuple[str, str, str]] = set()

    for line in lines[1:]:
        if line.section == "kind":
            raise ModelParseError("duplicate declaration", line.number, line.section_column, "kind")
        if line.section == "backward" and kind != "rcn":
            raise ModelParseError(f"section not allowed in a {kind} file", line.number, line.section_column,
                                  line.section)
        _expect_names(line, NET_NAME)
        if line.section in ("places", "transitions", "backward", "marking"):
            if line.section in seen_sections:
                raise ModelParseError("duplicate declaration", line.number, line.section_column, line.section)
            seen_sections.add(line.section)
        if line.section == "places":
            _declare(line, places, transitions)
        elif line.section == "transitions":
            _declare(line, transitions, places)
        elif line.section == "backward":
            backward = []
            for token, column in line.tokens:
                _require(token, column, line, transitions, "transition")
                if token in backward:
                    raise ModelParseError("duplicate declaration", line.number, column, token)
                backward.append(token)
        elif line.section == "marking":
            for token, column in line.tokens:
                _require(token, column, line, places, "place")
                marking.append(token)
        else:
            (first, first_col), (second, second_col) = _expect_pair(line)
            if line.section == "arc":
                _require(first, first_col, line, places | transitions, "node")
                _require(second, second_col, line, places | transitions, "node")
                if (first in places) == (second in places):
                    raise ModelParseError("an arc must join a place and a transition", line.number, second_col,
                                          second)
            else:
                _require(first, first_col, line, places, "place")
                _require(second, second_col, line, transitions, "transition")
            if (line.section, first, second) in seen_pairs:
                raise ModelParseError("duplicate declaration", line.number, first_col, first)
            seen_pairs.add((line.section, first, second))
            (flow if line.section == "arc" else inhibit).append((first, second))

    net = InhibitorNet(places, transitions, flow, inhibit, marking)
    logger.debug(f"Parsed {kind} net with {len(places)} places and {len(transitions)} transitions")
    return ParsedNet(kind, net, backward)


def serialize_net(net: InhibitorNet, kind: str = "ipt", backward: Optional[List[str]] = None) -> str:
    """Canonical text of a net; `backward` is written only for rcn files"""
    lines = [f"kind: {kind}", _section("places", net.places), _section("transitions", net.transitions)]
    if kind == "rcn" and backward is not None:
        lines.append(_section("backward", sorted(backward)))
    lines += [f"arc: {x} {y}" for x, y in sorted(net.flow)]
    lines += [f"inhibit: {s} {t}" for s, t in sorted(net.inhibit)]
    lines.append(_section("marking", net.initial_marking.to_list()))
    return "\n".join(lines) + "\n"


def load_model(path: Union[str, Path]) -> Union[ParsedEs, ParsedNet]:
    """Read a model file, choosing the grammar by extension (.es or .net)"""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".es":
        return parse_es(text)
    if path.suffix == ".net":
        return parse_net(text)
    raise ValueError(f"Unsupported model file extension '{path.suffix}' (expected .es or .net)")
