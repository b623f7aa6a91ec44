"""The scenario language.

A scenario is a line-oriented text file. Each non-blank line holds one
declaration; ``#`` starts a comment. The declaration kinds:

    scheme REG { mask = "LLDDLLL" }
    scheme NHS { mask = "A{10}" groups = 3-3-4 }
    entity car1 kind = vehicle
    ims dvla { scheme = REG bind car1 -> AB12CDE, car2 -> CD34EFG }
    attribute Overstay { session start = "arrive" end = "depart" duration > 7200000 ms }
    attribute Poster { instant action = "post" }
    attribute InZone { instant loc in ["zone-R", "zone-S"] }
    table keepers { from = REG to = KEEPER file = "dvla_keepers.csv" }
    graph docs { file = "identity_tree.jsonl" }
    observe { key = plate scheme = REG }
    sort { Overstay, Poster + LongSession }

Declarations may reference names declared on later lines; resolution
runs once the whole file is read. Errors carry the line (and for
syntax, the column) they point at.

``observe`` names the payload key and scheme the report pipeline uses
to extract identifiers from events. ``sort`` lists the category keys,
each a ``+``-joined set of attribute names. At most one ``observe`` is
allowed; several ``sort`` lines concatenate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..core import Entity, EntityKind, Scheme, validate_format
from ..errors import (
    DuplicateName,
    FormatMismatch,
    IoError,
    ScenarioSyntaxError,
    SchemeError,
    UnresolvedReference,
)
from ..ims import IdentityManagementSystem
from ..surveillance import AttributeDef, Comparator

_KEYWORDS = ("scheme", "entity", "ims", "attribute", "table", "graph", "observe", "sort")

_WORD_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_@")

_ENTITY_KINDS = {k.value: k for k in EntityKind}


# ---------------------------------------------------------------- model


@dataclass(frozen=True)
class SystemDecl:
    """An identity management system declaration: scheme plus initial binds."""

    name: str
    scheme: str
    binds: tuple[tuple[str, str], ...] = ()  # (entity, canonical value)
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class TableDecl:
    name: str
    from_scheme: str
    to_scheme: str
    file: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class GraphDecl:
    name: str
    file: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ObserveDecl:
    key: str
    scheme: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ScenarioModel:
    """Everything a scenario file declares, cross-references resolved."""

    schemes: Mapping[str, Scheme]
    entities: Mapping[str, Entity]
    systems: Mapping[str, SystemDecl]
    attributes: Mapping[str, AttributeDef]
    tables: Mapping[str, TableDecl]
    graphs: Mapping[str, GraphDecl]
    observe: ObserveDecl | None = None
    sort_keys: tuple[frozenset[str], ...] = ()

    def __post_init__(self) -> None:
        for name in ("schemes", "entities", "systems", "attributes", "tables", "graphs"):
            object.__setattr__(self, name, dict(getattr(self, name)))


def build_systems(model: ScenarioModel) -> dict[str, IdentityManagementSystem]:
    """Instantiate the declared systems and apply their binds."""
    out: dict[str, IdentityManagementSystem] = {}
    for name, decl in model.systems.items():
        ims = IdentityManagementSystem(name, model.schemes[decl.scheme])
        for entity, value in decl.binds:
            ims.bind(entity, value)
        out[name] = ims
    return out


# ------------------------------------------------------------- tokenizer


@dataclass(frozen=True)
class _Token:
    kind: str  # "word" | "string" | "punct" | "end"
    text: str
    column: int


def _strip_comment(raw: str) -> str:
    in_string = False
    for i, ch in enumerate(raw):
        if ch == '"':
            in_string = not in_string
        elif ch == "#" and not in_string:
            return raw[:i]
    return raw


def _tokenize(text: str, line: int) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        col = i + 1
        if ch in " \t":
            i += 1
        elif ch == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise ScenarioSyntaxError(line, col, "a closing quote")
            tokens.append(_Token("string", text[i + 1 : j], col))
            i = j + 1
        elif text.startswith("->", i):
            tokens.append(_Token("punct", "->", col))
            i += 2
        elif text.startswith("!=", i):
            tokens.append(_Token("punct", "!=", col))
            i += 2
        elif ch in "{}=,[]+<>":
            tokens.append(_Token("punct", ch, col))
            i += 1
        elif ch in _WORD_START:
            j = i + 1
            while j < n:
                if text[j] in _WORD_START:
                    j += 1
                elif text[j] == "-" and j + 1 < n and text[j + 1] in _WORD_START:
                    j += 2
                else:
                    break
            tokens.append(_Token("word", text[i:j], col))
            i = j
        else:
            raise ScenarioSyntaxError(line, col, f"a token (found {ch!r})")
    tokens.append(_Token("end", "", n + 1))
    return tokens


class _Line:
    """One tokenized declaration line with a take/expect cursor."""

    def __init__(self, tokens: list[_Token], number: int):
        self.tokens = tokens
        self.number = number
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self, expected: str, kind: str | None = None, text: str | None = None) -> _Token:
        tok = self.tokens[self.pos]
        if kind is not None and tok.kind != kind:
            raise ScenarioSyntaxError(self.number, tok.column, expected)
        if text is not None and tok.text != text:
            raise ScenarioSyntaxError(self.number, tok.column, expected)
        self.pos += 1
        return tok

    def word(self, expected: str) -> _Token:
        return self.take(expected, kind="word")

    def string(self, expected: str) -> _Token:
        return self.take(expected, kind="string")

    def punct(self, text: str) -> _Token:
        return self.take(f"'{text}'", kind="punct", text=text)

    def literal(self, word: str) -> _Token:
        return self.take(f"'{word}'", kind="word", text=word)

    def done(self) -> None:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            raise ScenarioSyntaxError(self.number, tok.column, "end of line")


# --------------------------------------------------------------- parsing


@dataclass
class _Draft:
    schemes: dict[str, Scheme]
    entities: dict[str, Entity]
    systems: dict[str, SystemDecl]
    attributes: dict[str, AttributeDef]
    tables: dict[str, TableDecl]
    graphs: dict[str, GraphDecl]
    observe: ObserveDecl | None
    sort_keys: list[tuple[frozenset[str], int]]
    attr_lines: dict[str, int]


def parse_scenario(text: str) -> ScenarioModel:
    """Parse scenario text into a resolved model.

    Two passes: every line is parsed first, so declarations may refer
    to names that appear further down; cross-references are checked
    once the whole text is read.
    """
    draft = _Draft({}, {}, {}, {}, {}, {}, None, [], {})
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(raw)
        if not stripped.strip():
            continue
        line = _Line(_tokenize(stripped, number), number)
        head = line.peek()
        if head.kind != "word" or head.text not in _KEYWORDS:
            raise ScenarioSyntaxError(
                number, head.column, "a declaration keyword (" + ", ".join(_KEYWORDS) + ")"
            )
        _PARSERS[head.text](line, draft)
    _resolve(draft)
    return ScenarioModel(
        schemes=draft.schemes,
        entities=draft.entities,
        systems=draft.systems,
        attributes=draft.attributes,
        tables=draft.tables,
        graphs=draft.graphs,
        observe=draft.observe,
        sort_keys=tuple(key for key, _ in draft.sort_keys),
    )


def load_scenario(path: str) -> ScenarioModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read scenario {path}: {exc.strerror or exc}") from None
    return parse_scenario(text)


def _claim(table: dict, name: str, line: int) -> None:
    if name in table:
        raise DuplicateName(name, line)


def _parse_scheme(line: _Line, draft: _Draft) -> None:
    line.literal("scheme")
    name = line.word("a scheme name").text
    _claim(draft.schemes, name, line.number)
    line.punct("{")
    line.literal("mask")
    line.punct("=")
    mask_tok = line.string("a quoted mask")
    groups: tuple[int, ...] | None = None
    if line.peek().text == "groups":
        line.literal("groups")
        line.punct("=")
        tok = line.word("a group list like 3-3-4")
        parts = tok.text.split("-")
        if not all(p.isdigit() and p for p in parts):
            raise ScenarioSyntaxError(line.number, tok.column, "a group list like 3-3-4")
        groups = tuple(int(p) for p in parts)
    line.punct("}")
    line.done()
    try:
        draft.schemes[name] = Scheme(name, mask_tok.text, groups)
    except SchemeError as exc:
        raise ScenarioSyntaxError(line.number, mask_tok.column, f"a well-formed mask ({exc})")


def _parse_entity(line: _Line, draft: _Draft) -> None:
    line.literal("entity")
    name = line.word("an entity name").text
    _claim(draft.entities, name, line.number)
    line.literal("kind")
    line.punct("=")
    kind_tok = line.word("an entity kind")
    line.done()
    kind = _ENTITY_KINDS.get(kind_tok.text)
    if kind is None:
        raise ScenarioSyntaxError(
            line.number,
            kind_tok.column,
            "an entity kind (" + ", ".join(sorted(_ENTITY_KINDS)) + ")",
        )
    draft.entities[name] = Entity(name, kind)


def _parse_ims(line: _Line, draft: _Draft) -> None:
    line.literal("ims")
    name = line.word("a system name").text
    _claim(draft.systems, name, line.number)
    line.punct("{")
    line.literal("scheme")
    line.punct("=")
    scheme = line.word("a scheme name").text
    binds: list[tuple[str, str]] = []
    if line.peek().text == "bind":
        line.literal("bind")
        while True:
            entity = line.word("an entity name").text
            line.punct("->")
            tok = line.peek()
            if tok.kind not in ("word", "string"):
                raise ScenarioSyntaxError(line.number, tok.column, "an identifier value")
            line.pos += 1
            binds.append((entity, tok.text))
            if line.peek().text != ",":
                break
            line.punct(",")
    line.punct("}")
    line.done()
    draft.systems[name] = SystemDecl(name, scheme, tuple(binds), line=line.number)


def _comparator(line: _Line, allowed: tuple[Comparator, ...]) -> Comparator:
    tok = line.peek()
    symbols = {c.value: c for c in allowed}
    cmp = symbols.get(tok.text)
    if cmp is None or tok.kind not in ("punct", "word"):
        raise ScenarioSyntaxError(
            line.number, tok.column, "a comparator (" + ", ".join(sorted(symbols)) + ")"
        )
    line.pos += 1
    return cmp


def _parse_attribute(line: _Line, draft: _Draft) -> None:
    line.literal("attribute")
    name = line.word("an attribute name").text
    _claim(draft.attributes, name, line.number)
    line.punct("{")
    branch = line.word("'instant' or 'session'")
    if branch.text == "instant":
        key = line.word("a payload key").text
        cmp = _comparator(line, tuple(Comparator))
        reference: str | frozenset[str]
        if cmp is Comparator.IN:
            line.punct("[")
            members = [line.string("a quoted value").text]
            while line.peek().text == ",":
                line.punct(",")
                members.append(line.string("a quoted value").text)
            line.punct("]")
            reference = frozenset(members)
        else:
            reference = line.string("a quoted value").text
        attr = AttributeDef(name, "instant", key=key, comparator=cmp, reference=reference)
    elif branch.text == "session":
        line.literal("start")
        line.punct("=")
        start = line.string("a quoted start marker").text
        line.literal("end")
        line.punct("=")
        end = line.string("a quoted end marker").text
        line.literal("duration")
        cmp = _comparator(line, (Comparator.LT, Comparator.GT))
        tok = line.word("a duration in ms")
        if not tok.text.isdigit():
            raise ScenarioSyntaxError(line.number, tok.column, "a duration in ms")
        line.literal("ms")
        attr = AttributeDef(
            name,
            "session",
            comparator=cmp,
            start_value=start,
            end_value=end,
            threshold_ms=int(tok.text),
        )
    else:
        raise ScenarioSyntaxError(line.number, branch.column, "'instant' or 'session'")
    line.punct("}")
    line.done()
    draft.attributes[name] = attr
    draft.attr_lines[name] = line.number


def _parse_table(line: _Line, draft: _Draft) -> None:
    line.literal("table")
    name = line.word("a table name").text
    _claim(draft.tables, name, line.number)
    line.punct("{")
    line.literal("from")
    line.punct("=")
    from_scheme = line.word("a scheme name").text
    line.literal("to")
    line.punct("=")
    to_scheme = line.word("a scheme name").text
    line.literal("file")
    line.punct("=")
    file = line.string("a quoted file path").text
    line.punct("}")
    line.done()
    draft.tables[name] = TableDecl(name, from_scheme, to_scheme, file, line=line.number)


def _parse_graph(line: _Line, draft: _Draft) -> None:
    line.literal("graph")
    name = line.word("a graph name").text
    _claim(draft.graphs, name, line.number)
    line.punct("{")
    line.literal("file")
    line.punct("=")
    file = line.string("a quoted file path").text
    line.punct("}")
    line.done()
    draft.graphs[name] = GraphDecl(name, file, line=line.number)


def _parse_observe(line: _Line, draft: _Draft) -> None:
    line.literal("observe")
    if draft.observe is not None:
        raise DuplicateName("observe", line.number)
    line.punct("{")
    line.literal("key")
    line.punct("=")
    key = line.word("a payload key").text
    line.literal("scheme")
    line.punct("=")
    scheme = line.word("a scheme name").text
    line.punct("}")
    line.done()
    draft.observe = ObserveDecl(key, scheme, line=line.number)


def _parse_sort(line: _Line, draft: _Draft) -> None:
    line.literal("sort")
    line.punct("{")
    while True:
        names = [line.word("an attribute name").text]
        while line.peek().text == "+":
            line.punct("+")
            names.append(line.word("an attribute name").text)
        draft.sort_keys.append((frozenset(names), line.number))
        if line.peek().text != ",":
            break
        line.punct(",")
    line.punct("}")
    line.done()


_PARSERS = {
    "scheme": _parse_scheme,
    "entity": _parse_entity,
    "ims": _parse_ims,
    "attribute": _parse_attribute,
    "table": _parse_table,
    "graph": _parse_graph,
    "observe": _parse_observe,
    "sort": _parse_sort,
}


def _resolve(draft: _Draft) -> None:
    """Check every cross-reference and canonicalize bind values."""
    for name, decl in draft.systems.items():
        if decl.scheme not in draft.schemes:
            raise UnresolvedReference(decl.scheme, decl.line)
        scheme = draft.schemes[decl.scheme]
        binds = []
        for entity, value in decl.binds:
            if entity not in draft.entities:
                raise UnresolvedReference(entity, decl.line)
            result = validate_format(value, scheme)
            if not result.valid:
                raise FormatMismatch(
                    f"line {decl.line}: bind value {value!r} does not match "
                    f"scheme {scheme.name} ({scheme.mask})"
                )
            binds.append((entity, result.canonical))
        draft.systems[name] = SystemDecl(name, decl.scheme, tuple(binds), line=decl.line)
    for decl in draft.tables.values():
        for ref in (decl.from_scheme, decl.to_scheme):
            if ref not in draft.schemes:
                raise UnresolvedReference(ref, decl.line)
    if draft.observe is not None and draft.observe.scheme not in draft.schemes:
        raise UnresolvedReference(draft.observe.scheme, draft.observe.line)
    for key, line in draft.sort_keys:
        for ref in sorted(key):
            if ref not in draft.attributes:
                raise UnresolvedReference(ref, line)


# ----------------------------------------------------------- serializing


def _quote(text: str) -> str:
    return f'"{text}"'


def _bare_or_quoted(value: str) -> str:
    ok = value and value[0] in _WORD_START and all(c in _WORD_START or c == "-" for c in value)
    return value if ok else _quote(value)


def _emit_attribute(attr: AttributeDef) -> str:
    if attr.kind == "session":
        return (
            f"attribute {attr.name} {{ session start = {_quote(attr.start_value)} "
            f"end = {_quote(attr.end_value)} duration {attr.comparator.value} "
            f"{attr.threshold_ms} ms }}"
        )
    if isinstance(attr.reference, frozenset):
        ref = "[" + ", ".join(_quote(m) for m in sorted(attr.reference)) + "]"
    else:
        ref = _quote(attr.reference)
    return f"attribute {attr.name} {{ instant {attr.key} {attr.comparator.value} {ref} }}"


def serialize_scenario(model: ScenarioModel) -> str:
    """Render a model back to scenario text.

    Reparsing the output yields a model equal to the input; declaration
    order is normalized, not preserved.
    """
    lines: list[str] = []
    for s in model.schemes.values():
        groups = ""
        if s.display_groups is not None:
            groups = " groups = " + "-".join(str(g) for g in s.display_groups)
        lines.append(f"scheme {s.name} {{ mask = {_quote(s.mask)}{groups} }}")
    for e in model.entities.values():
        lines.append(f"entity {e.id} kind = {e.kind.value}")
    for d in model.systems.values():
        binds = ""
        if d.binds:
            pairs = ", ".join(f"{ent} -> {_bare_or_quoted(val)}" for ent, val in d.binds)
            binds = f" bind {pairs}"
        lines.append(f"ims {d.name} {{ scheme = {d.scheme}{binds} }}")
    for a in model.attributes.values():
        lines.append(_emit_attribute(a))
    for t in model.tables.values():
        lines.append(
            f"table {t.name} {{ from = {t.from_scheme} to = {t.to_scheme} "
            f"file = {_quote(t.file)} }}"
        )
    for g in model.graphs.values():
        lines.append(f"graph {g.name} {{ file = {_quote(g.file)} }}")
    if model.observe is not None:
        lines.append(f"observe {{ key = {model.observe.key} scheme = {model.observe.scheme} }}")
    if model.sort_keys:
        keys = ", ".join(" + ".join(sorted(k)) for k in model.sort_keys)
        lines.append(f"sort {{ {keys} }}")
    return "\n".join(lines) + "\n"
