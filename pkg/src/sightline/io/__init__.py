"""File formats: scenario text, event logs, reports, snapshots, tables.

Every file read or write in the package happens in this subpackage;
the domain modules stay pure.
"""

from .dsl import (
    GraphDecl,
    ObserveDecl,
    ScenarioModel,
    SystemDecl,
    TableDecl,
    build_systems,
    load_scenario,
    parse_scenario,
    serialize_scenario,
)
from .events import EventRecord, load_events
from .reports import render_report, write_report
from .snapshots import load_snapshot, save_snapshot
from .tables import load_graph, load_pairs, load_table

__all__ = [
    "EventRecord",
    "GraphDecl",
    "ObserveDecl",
    "ScenarioModel",
    "SystemDecl",
    "TableDecl",
    "build_systems",
    "load_events",
    "load_graph",
    "load_pairs",
    "load_scenario",
    "load_snapshot",
    "load_table",
    "parse_scenario",
    "render_report",
    "save_snapshot",
    "serialize_scenario",
    "write_report",
]
