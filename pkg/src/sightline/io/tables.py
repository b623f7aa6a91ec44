"""Tabular inputs: transform tables, association pairs, identity graphs.

Transform tables are two-column CSV whose header row names the source
and target schemes, e.g. ``REG,KEEPER``. Association pair files are CSV
with the fixed header ``identifier,entity``. Identity graphs are JSON
Lines, one node per line:

    {"id": "passport", "source": "state-guaranteed", "weight": 0.9,
     "valid": true, "supports": ["birth-certificate", "photo"]}

``weight`` defaults to 1.0, ``valid`` to true, ``supports`` to none.
All loaders fail fast on the first bad line.
"""

from __future__ import annotations

import csv
import json
import os

from ..associations import Association
from ..core import canonicalize
from ..errors import IoError, MalformedLine
from ..provenance import SourceKind, IdentityGraph, IdentityNode
from ..transform import TransformTable

_SOURCE_KINDS = {k.value: k for k in SourceKind}


def _read_csv(path: str, what: str) -> list[tuple[int, list[str]]]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            return [(n, row) for n, row in enumerate(csv.reader(fh), start=1) if row]
    except OSError as exc:
        raise IoError(f"cannot read {what} {path}: {exc.strerror or exc}") from None


def load_table(path: str, name: str | None = None) -> TransformTable:
    """Load a transform table; the CSV header names the two schemes."""
    rows = _read_csv(path, "table")
    if not rows:
        raise MalformedLine(1, "missing header row naming the schemes")
    header_line, header = rows[0]
    if len(header) != 2 or not header[0].strip() or not header[1].strip():
        raise MalformedLine(header_line, "header must name exactly two schemes")
    from_scheme, to_scheme = header[0].strip(), header[1].strip()
    mapping: dict[str, str] = {}
    for number, row in rows[1:]:
        if len(row) != 2:
            raise MalformedLine(number, f"expected 2 columns, got {len(row)}")
        source, target = canonicalize(row[0]), canonicalize(row[1])
        if not source or not target:
            raise MalformedLine(number, "empty identifier")
        if source in mapping:
            raise MalformedLine(number, f"duplicate source identifier {source!r}")
        mapping[source] = target
    table_name = name if name is not None else os.path.splitext(os.path.basename(path))[0]
    return TransformTable(table_name, from_scheme, to_scheme, mapping)


def load_pairs(path: str, label: str = "") -> Association:
    """Load an identifier/entity pair file into an association."""
    rows = _read_csv(path, "pairs")
    if not rows or [c.strip() for c in rows[0][1]] != ["identifier", "entity"]:
        raise MalformedLine(rows[0][0] if rows else 1, 'header must be "identifier,entity"')
    pairs = []
    for number, row in rows[1:]:
        if len(row) != 2:
            raise MalformedLine(number, f"expected 2 columns, got {len(row)}")
        identifier, entity = canonicalize(row[0]), row[1].strip()
        if not identifier or not entity:
            raise MalformedLine(number, "empty identifier or entity")
        pairs.append((identifier, entity))
    return Association(pairs, label=label or os.path.splitext(os.path.basename(path))[0])


def _parse_node(raw: str, number: int) -> IdentityNode:
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedLine(number, exc.msg) from None
    if not isinstance(doc, dict):
        raise MalformedLine(number, "expected a JSON object")
    nid = doc.get("id")
    if not isinstance(nid, str) or not nid:
        raise MalformedLine(number, '"id" must be a non-empty string')
    source = doc.get("source")
    if source not in _SOURCE_KINDS:
        raise MalformedLine(number, '"source" must be one of ' + ", ".join(sorted(_SOURCE_KINDS)))
    weight = doc.get("weight", 1.0)
    if (
        isinstance(weight, bool)
        or not isinstance(weight, (int, float))
        or not 0.0 <= weight <= 1.0
    ):
        raise MalformedLine(number, '"weight" must be a number in [0, 1]')
    valid = doc.get("valid", True)
    if not isinstance(valid, bool):
        raise MalformedLine(number, '"valid" must be a boolean')
    supports = doc.get("supports", [])
    if not isinstance(supports, list) or not all(isinstance(s, str) for s in supports):
        raise MalformedLine(number, '"supports" must be a list of node ids')
    extra = set(doc) - {"id", "source", "weight", "valid", "supports"}
    if extra:
        raise MalformedLine(number, f"unexpected keys: {', '.join(sorted(extra))}")
    return IdentityNode(nid, _SOURCE_KINDS[source], float(weight), valid, list(supports))


def load_graph(path: str) -> IdentityGraph:
    """Load a JSONL identity graph file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read graph {path}: {exc.strerror or exc}") from None
    nodes: list[IdentityNode] = []
    seen: set[str] = set()
    for number, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        node = _parse_node(raw, number)
        if node.id in seen:
            raise MalformedLine(number, f"duplicate node id {node.id!r}")
        seen.add(node.id)
        nodes.append(node)
    return IdentityGraph(nodes)
