"""Report serialization.

The structured format is canonical JSON: object keys sorted, arrays in
report order (entries by identifier, categories by declared key order),
indent of 2, trailing newline, integer timestamps only. Writing the
same report twice yields byte-identical files, which is what the golden
tests pin down.

The table format is a fixed-width human view of the same content. It is
deterministic too, but only the structured form is the canonical one.
"""

from __future__ import annotations

import json

from ..errors import IoError
from ..surveillance import SortingReport, SurveillanceReport

SCHEMA_VERSION = 1

FORMATS = ("structured", "table")


def _as_sorting(report: SurveillanceReport | SortingReport) -> SortingReport:
    if isinstance(report, SortingReport):
        return report
    return SortingReport(report)


def report_document(report: SurveillanceReport | SortingReport) -> dict:
    """The report as one JSON-ready dict in canonical array order."""
    sorting = _as_sorting(report)
    base = sorting.report
    return {
        "schema": SCHEMA_VERSION,
        "attributes": list(base.attribute_names),
        "entries": [
            {
                "identifier": e.identifier,
                "attributes": list(e.attributes),
                "t": e.t,
                "loc": e.loc,
                "provisional": e.provisional,
            }
            for e in base.entries
        ],
        "categories": [
            {"key": sorted(c.key), "members": sorted(c.members)}
            for c in sorting.categories
        ],
        "meta": {
            "events_total": base.meta.events_total,
            "events_processed": base.meta.events_processed,
            "quarantine": {
                "missing_field": base.meta.quarantine.missing_field,
                "format_mismatch": base.meta.quarantine.format_mismatch,
                "unmatched_end": base.meta.quarantine.unmatched_end,
            },
            "stream_end": base.meta.stream_end,
        },
    }


def _columns(rows: list[tuple[str, ...]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    out = []
    for row in rows:
        out.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(out)


def _render_table(report: SortingReport) -> str:
    base = report.report
    blocks: list[str] = []
    rows = [("IDENTIFIER", "ATTRIBUTES", "T", "LOC", "FLAG")]
    for e in base.entries:
        rows.append(
            (
                e.identifier,
                "+".join(e.attributes) or "-",
                str(e.t),
                e.loc,
                "provisional" if e.provisional else "",
            )
        )
    blocks.append(_columns(rows))
    if report.categories:
        rows = [("CATEGORY", "MEMBERS")]
        for c in report.categories:
            rows.append(("{" + "+".join(sorted(c.key)) + "}", ", ".join(sorted(c.members)) or "-"))
        blocks.append(_columns(rows))
    meta = base.meta
    blocks.append(
        f"events_total={meta.events_total} events_processed={meta.events_processed} "
        f"quarantined={meta.quarantine.total} stream_end={meta.stream_end}"
    )
    return "\n\n".join(blocks) + "\n"


def render_report(report: SurveillanceReport | SortingReport, format: str = "structured") -> str:
    if format == "structured":
        return json.dumps(report_document(report), sort_keys=True, indent=2) + "\n"
    if format == "table":
        return _render_table(_as_sorting(report))
    raise ValueError(f"unknown report format {format!r}")


def write_report(
    report: SurveillanceReport | SortingReport, path: str, format: str = "structured"
) -> None:
    text = render_report(report, format)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write report {path}: {exc.strerror or exc}") from None
