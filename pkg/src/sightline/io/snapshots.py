"""Versioned state snapshots.

A snapshot freezes a scenario model together with the mutable state of
its identity management systems (serial counters, bindings, the
seen-value set, the revocation log). Loading a snapshot rebuilds
structurally equal objects, so save/load is a true round trip.

Layout: a single JSON object with a leading "version" field, the
scenario rendered back to its text form, and one state record per
system keyed by system name.
"""

from __future__ import annotations

import json
from typing import Mapping

from ..errors import CorruptSnapshot, IoError, VersionMismatch
from ..ims import IdentityManagementSystem
from .dsl import ScenarioModel, parse_scenario, serialize_scenario

SNAPSHOT_VERSION = 1


def save_snapshot(
    model: ScenarioModel,
    systems: Mapping[str, IdentityManagementSystem],
    path: str,
) -> None:
    doc = {
        "version": SNAPSHOT_VERSION,
        "scenario": serialize_scenario(model),
        "systems": {
            name: {
                "scheme": ims.scheme.name,
                "serial": ims.serial,
                "pairs": sorted([i, e] for i, e in ims._pairs),
                "seen": sorted(ims._seen),
                "revocations": list(ims.revocations),
            }
            for name, ims in sorted(systems.items())
        },
    }
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write snapshot {path}: {exc.strerror or exc}") from None


def _shape(cond: bool, reason: str) -> None:
    if not cond:
        raise CorruptSnapshot(0, reason)


def load_snapshot(path: str) -> tuple[ScenarioModel, dict[str, IdentityManagementSystem]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read snapshot {path}: {exc.strerror or exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptSnapshot(exc.pos, exc.msg) from None

    _shape(isinstance(doc, dict), "expected a JSON object")
    version = doc.get("version")
    _shape(version is not None, 'missing "version"')
    if version != SNAPSHOT_VERSION:
        raise VersionMismatch(f"snapshot version {version!r}, expected {SNAPSHOT_VERSION}")
    _shape(isinstance(doc.get("scenario"), str), '"scenario" must be scenario text')
    _shape(isinstance(doc.get("systems"), dict), '"systems" must be an object')

    model = parse_scenario(doc["scenario"])
    systems: dict[str, IdentityManagementSystem] = {}
    for name, state in doc["systems"].items():
        _shape(isinstance(state, dict), f"system {name}: expected an object")
        scheme_name = state.get("scheme")
        _shape(scheme_name in model.schemes, f"system {name}: unknown scheme {scheme_name!r}")
        serial = state.get("serial")
        _shape(
            isinstance(serial, int) and not isinstance(serial, bool) and serial >= 0,
            f"system {name}: bad serial",
        )
        pairs = state.get("pairs")
        _shape(
            isinstance(pairs, list)
            and all(
                isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p)
                for p in pairs
            ),
            f"system {name}: bad pairs",
        )
        seen = state.get("seen")
        _shape(
            isinstance(seen, list) and all(isinstance(v, str) for v in seen),
            f"system {name}: bad seen list",
        )
        revocations = state.get("revocations")
        _shape(
            isinstance(revocations, list) and all(isinstance(v, str) for v in revocations),
            f"system {name}: bad revocation log",
        )
        ims = IdentityManagementSystem(name, model.schemes[scheme_name])
        ims.serial = serial
        ims._pairs = {(i, e) for i, e in pairs}
        ims._seen = set(seen)
        ims.revocations = list(revocations)
        systems[name] = ims
    return model, systems
