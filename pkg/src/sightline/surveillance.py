"""The observation pipeline: extract, assemble, recognize, sort.

Stages, each pure given the time-sorted event stream:

1. extract an identifier from each event's payload and canonicalize it
   against the watch scheme (failures are quarantined, counted, and
   never influence anything downstream);
2. assemble per-identifier behaviour: paired start/end sessions plus the
   flat list of events for instant predicates;
3. recognize attributes of each behaviour record;
4. report one entry per identifier that exhibited anything, ordered by
   canonical identifier value;
5. optionally sort reported identifiers into attribute-keyed categories.

Session pairing is FIFO per identifier: an end event closes the oldest
pending start. Events whose payload field ``event`` matches no pending
start for any end marker are quarantined. A start that never closes
becomes a session ending at stream end, flagged open; attributes it
establishes mark the report entry provisional.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .core import Identifier, ObservationEvent, Scheme, validate_format
from .errors import FormatMismatch, MissingField, UnknownAttribute

# Payload field consulted for session start/end markers.
SESSION_MARKER_KEY = "event"

# Instant predicates may reference the event's location label by this key.
LOCATION_KEY = "loc"


class Comparator(enum.Enum):
    EQ = "="
    NE = "!="
    LT = "<"
    GT = ">"
    IN = "in"


@dataclass(frozen=True)
class AttributeDef:
    """A named, recognizable property of behaviour.

    Instant attributes test a single payload field of single events;
    session attributes test the duration of paired start/end sessions.
    """

    name: str
    kind: str  # "instant" or "session"
    # instant
    key: str = ""
    comparator: Comparator = Comparator.EQ
    reference: str | frozenset[str] = ""
    # session
    start_value: str = ""
    end_value: str = ""
    threshold_ms: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("instant", "session"):
            raise ValueError(f"attribute {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == "session":
            if self.comparator not in (Comparator.GT, Comparator.LT):
                raise ValueError(f"attribute {self.name!r}: session comparator must be < or >")
            if self.threshold_ms < 0:
                raise ValueError(f"attribute {self.name!r}: threshold must be >= 0")
        if isinstance(self.reference, (set, frozenset)):
            object.__setattr__(self, "reference", frozenset(self.reference))


@dataclass(frozen=True)
class Session:
    start: int
    end: int
    loc: str
    marker: str  # name of the attribute whose start/end values paired it
    open: bool = False

    @property
    def duration(self) -> int:
        return self.end - self.start


@dataclass
class BehaviorRecord:
    identifier: Identifier
    sessions: list[Session] = field(default_factory=list)
    instants: list[ObservationEvent] = field(default_factory=list)
    stream_end: int = 0


@dataclass(frozen=True)
class QuarantineCounts:
    missing_field: int = 0
    format_mismatch: int = 0
    unmatched_end: int = 0

    @property
    def total(self) -> int:
        return self.missing_field + self.format_mismatch + self.unmatched_end


@dataclass(frozen=True)
class ReportEntry:
    identifier: str
    attributes: tuple[str, ...]
    t: int
    loc: str
    provisional: bool = False


@dataclass(frozen=True)
class ReportMeta:
    events_total: int
    events_processed: int
    quarantine: QuarantineCounts
    stream_end: int


@dataclass(frozen=True)
class SurveillanceReport:
    entries: tuple[ReportEntry, ...]
    attribute_names: tuple[str, ...]
    meta: ReportMeta


@dataclass(frozen=True)
class Category:
    key: frozenset[str]
    members: frozenset[str]


@dataclass(frozen=True)
class SortingReport:
    report: SurveillanceReport
    categories: tuple[Category, ...] = ()
    # declared key order, for serialization
    keys: tuple[frozenset[str], ...] = ()


@dataclass(frozen=True)
class WatchContext:
    """What the pipeline watches for: attributes, payload key, scheme."""

    attrs: tuple[AttributeDef, ...]
    key: str
    scheme: Scheme


def extract_identifier(ev: ObservationEvent, key: str, scheme: Scheme) -> Identifier:
    """Read payload[key] and canonicalize it against the scheme."""
    if key not in ev.payload:
        raise MissingField(f"event at t={ev.t} has no payload field {key!r}")
    raw = ev.payload[key]
    result = validate_format(raw, scheme)
    if not result.valid:
        raise FormatMismatch(
            f"event at t={ev.t}: {raw!r} does not match scheme {scheme.name} ({scheme.mask})"
        )
    assert result.canonical is not None
    return Identifier(scheme.name, result.canonical)


def _instant_view(ev: ObservationEvent) -> Mapping[str, str]:
    if LOCATION_KEY in ev.payload:
        return ev.payload
    view = dict(ev.payload)
    view[LOCATION_KEY] = ev.loc
    return view


def _as_number(text: str) -> float | None:
    try:
        return float(text)
    except ValueError:
        return None


def instant_holds(attr: AttributeDef, ev: ObservationEvent) -> bool:
    """Does one event satisfy an instant attribute's predicate?"""
    view = _instant_view(ev)
    if attr.key not in view:
        return False
    value = view[attr.key]
    cmp, ref = attr.comparator, attr.reference
    if cmp is Comparator.IN:
        return value in ref
    assert isinstance(ref, str)
    if cmp is Comparator.EQ:
        return value == ref
    if cmp is Comparator.NE:
        return value != ref
    left, right = _as_number(value), _as_number(ref)
    if left is None or right is None:
        return False
    return left < right if cmp is Comparator.LT else left > right


def _session_holds(attr: AttributeDef, session: Session) -> bool:
    if session.marker != attr.name:
        return False
    if attr.comparator is Comparator.GT:
        return session.duration > attr.threshold_ms
    return session.duration < attr.threshold_ms


@dataclass
class _AssemblyResult:
    records: dict[str, BehaviorRecord]
    quarantine: QuarantineCounts
    stream_end: int
    events_total: int
    events_processed: int


def _assemble(
    events: Sequence[ObservationEvent],
    session_attrs: Sequence[AttributeDef],
    key: str,
    scheme: Scheme,
) -> _AssemblyResult:
    stream_end = max((ev.t for ev in events), default=0)
    records: dict[str, BehaviorRecord] = {}
    pending: dict[tuple[str, str], deque[ObservationEvent]] = {}
    q_missing = q_format = q_unmatched = 0
    processed = 0

    for ev in events:
        try:
            ident = extract_identifier(ev, key, scheme)
        except MissingField:
            q_missing += 1
            continue
        except FormatMismatch:
            q_format += 1
            continue
        rec = records.get(ident.value)
        if rec is None:
            rec = BehaviorRecord(ident, stream_end=stream_end)
            records[ident.value] = rec

        marker = ev.payload.get(SESSION_MARKER_KEY)
        starts = [a for a in session_attrs if a.start_value == marker]
        ends = [a for a in session_attrs if a.end_value == marker]
        closed_any = False
        for attr in ends:
            queue = pending.get((ident.value, attr.name))
            if queue:
                start_ev = queue.popleft()
                rec.sessions.append(Session(start_ev.t, ev.t, start_ev.loc, attr.name))
                closed_any = True
        for attr in starts:
            pending.setdefault((ident.value, attr.name), deque()).append(ev)
        if ends and not closed_any and not starts:
            q_unmatched += 1
            continue
        rec.instants.append(ev)
        processed += 1

    for (value, marker), queue in pending.items():
        for start_ev in queue:
            records[value].sessions.append(
                Session(start_ev.t, stream_end, start_ev.loc, marker, open=True)
            )

    return _AssemblyResult(
        records=records,
        quarantine=QuarantineCounts(q_missing, q_format, q_unmatched),
        stream_end=stream_end,
        events_total=len(events),
        events_processed=processed,
    )


def assemble_sessions(
    events: Sequence[ObservationEvent],
    attr: AttributeDef,
    key: str,
    scheme: Scheme,
) -> dict[Identifier, BehaviorRecord]:
    """Pair one attribute's start/end events into per-identifier sessions.

    Events must already be sorted by time, ties in input order.
    """
    if attr.kind != "session":
        raise ValueError(f"attribute {attr.name!r} is not a session attribute")
    result = _assemble(events, [attr], key, scheme)
    return {rec.identifier: rec for rec in result.records.values()}


def recognize_attributes(rec: BehaviorRecord, attrs: Sequence[AttributeDef]) -> set[str]:
    """Names of the attributes this behaviour record exhibits."""
    names, _, _ = _recognize(rec, attrs)
    return names


def _recognize(
    rec: BehaviorRecord, attrs: Sequence[AttributeDef]
) -> tuple[set[str], dict[str, tuple[int, str]], bool]:
    """Recognized names, per-attribute earliest evidence, provisional flag.

    An attribute's evidence is the earliest satisfying session start or
    event. The record is provisional when some recognized session
    attribute is satisfied only by open sessions.
    """
    names: set[str] = set()
    evidence: dict[str, tuple[int, str]] = {}
    provisional = False
    for attr in attrs:
        if attr.kind == "session":
            hits = [s for s in rec.sessions if _session_holds(attr, s)]
            if not hits:
                continue
            names.add(attr.name)
            best = min(hits, key=lambda s: s.start)
            evidence[attr.name] = (best.start, best.loc)
            if all(s.open for s in hits):
                provisional = True
        else:
            hit = next((ev for ev in rec.instants if instant_holds(attr, ev)), None)
            if hit is None:
                continue
            names.add(attr.name)
            evidence[attr.name] = (hit.t, hit.loc)
    return names, evidence, provisional


def surveil(events: Sequence[ObservationEvent], context: WatchContext) -> SurveillanceReport:
    """Run the full pipeline over a time-sorted event stream."""
    session_attrs = [a for a in context.attrs if a.kind == "session"]
    assembly = _assemble(events, session_attrs, context.key, context.scheme)

    entries: list[ReportEntry] = []
    for value in sorted(assembly.records):
        rec = assembly.records[value]
        names, evidence, provisional = _recognize(rec, context.attrs)
        if not names:
            continue
        t, loc = min(evidence[n] + (n,) for n in names)[:2]
        entries.append(ReportEntry(value, tuple(sorted(names)), t, loc, provisional))

    meta = ReportMeta(
        events_total=assembly.events_total,
        events_processed=assembly.events_processed,
        quarantine=assembly.quarantine,
        stream_end=assembly.stream_end,
    )
    return SurveillanceReport(
        entries=tuple(entries),
        attribute_names=tuple(sorted(a.name for a in context.attrs)),
        meta=meta,
    )


def social_sort(
    report: SurveillanceReport, keys: Sequence[Iterable[str]]
) -> list[Category]:
    """Group reported identifiers into possibly overlapping categories.

    For each key set K the category holds every identifier whose
    recognized attributes include all of K; empty categories are kept.
    """
    known = set(report.attribute_names)
    categories: list[Category] = []
    for raw_key in keys:
        key = frozenset(raw_key)
        unknown = sorted(key - known)
        if unknown:
            raise UnknownAttribute(f"sorting key names unknown attributes: {', '.join(unknown)}")
        members = frozenset(
            entry.identifier for entry in report.entries if key <= set(entry.attributes)
        )
        categories.append(Category(key, members))
    return categories


def is_subcategory(c1: Category, c2: Category) -> bool:
    """A stricter key makes a subcategory: key(c1) must contain key(c2)."""
    return c1.key >= c2.key
