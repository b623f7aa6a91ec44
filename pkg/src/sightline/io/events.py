"""Event-log ingestion.

Event logs are JSON Lines: one object per line, shaped

    {"t": <int ms>, "loc": <string>, "payload": {<string>: <string>}, "truth": <optional string>}

Parsing is fail-fast: the first malformed line aborts the whole load so
a report can never be built from a partially read log. Records come
back stably sorted by timestamp, so equal timestamps keep file order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..core import ObservationEvent
from ..errors import IoError, MalformedLine

_ALLOWED_KEYS = {"t", "loc", "payload", "truth"}


@dataclass(frozen=True)
class EventRecord:
    event: ObservationEvent
    line: int


def _parse_line(raw: str, number: int) -> ObservationEvent:
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedLine(number, exc.msg) from None
    if not isinstance(doc, dict):
        raise MalformedLine(number, "expected a JSON object")
    extra = set(doc) - _ALLOWED_KEYS
    if extra:
        raise MalformedLine(number, f"unexpected keys: {', '.join(sorted(extra))}")
    t = doc.get("t")
    if not isinstance(t, int) or isinstance(t, bool) or t < 0:
        raise MalformedLine(number, '"t" must be a non-negative integer')
    loc = doc.get("loc")
    if not isinstance(loc, str):
        raise MalformedLine(number, '"loc" must be a string')
    payload = doc.get("payload")
    if (
        not isinstance(payload, dict)
        or not payload
        or not all(isinstance(k, str) and isinstance(v, str) for k, v in payload.items())
    ):
        raise MalformedLine(number, '"payload" must be a non-empty string-to-string object')
    truth = doc.get("truth")
    if truth is not None and not isinstance(truth, str):
        raise MalformedLine(number, '"truth" must be a string when present')
    return ObservationEvent(t=t, loc=loc, payload=payload, truth=truth)


def load_events(path: str) -> list[EventRecord]:
    """Read a JSONL event log, sorted by timestamp (stable on ties)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read events {path}: {exc.strerror or exc}") from None
    records = [
        EventRecord(_parse_line(raw, number), number)
        for number, raw in enumerate(lines, start=1)
        if raw.strip()
    ]
    records.sort(key=lambda r: r.event.t)
    return records
