"""Finite entity-identifier relations and their cardinality classes.

An association is a finite set of (identifier, entity) pairs. Identifiers
are carried as canonical string tokens; callers that work with schemed
identifiers canonicalize before building the relation. Four shapes are
possible, named here by what is shared rather than by direction words:

    OneOne               every identifier and every entity appears at most once
    SharedEntityManyIds  one entity may hold several identifiers
    SharedIdManyEntities one identifier may name several entities
    ManyMany             both kinds of sharing occur

All operations are pure; associations are immutable values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import Ambiguous, NotFound, PreconditionViolated


class CardinalityClass(enum.Enum):
    ONE_ONE = "OneOne"
    SHARED_ENTITY_MANY_IDS = "SharedEntityManyIds"
    SHARED_ID_MANY_ENTITIES = "SharedIdManyEntities"
    MANY_MANY = "ManyMany"


# Human gloss printed next to the class name by the CLI.
CARDINALITY_GLOSS = {
    CardinalityClass.ONE_ONE: "distinct identifiers name distinct entities",
    CardinalityClass.SHARED_ENTITY_MANY_IDS: "several identifiers name one entity",
    CardinalityClass.SHARED_ID_MANY_ENTITIES: "one identifier names several entities",
    CardinalityClass.MANY_MANY: "identifiers and entities are both shared",
}


@dataclass(frozen=True)
class Association:
    """A labelled finite relation between identifier tokens and entity ids."""

    pairs: frozenset[tuple[str, str]]
    label: str = ""

    def __init__(self, pairs=(), label: str = ""):
        object.__setattr__(self, "pairs", frozenset(pairs))
        object.__setattr__(self, "label", label)

    @property
    def identifiers(self) -> set[str]:
        return {i for i, _ in self.pairs}

    @property
    def entities(self) -> set[str]:
        return {e for _, e in self.pairs}


def classify_cardinality(a: Association) -> CardinalityClass:
    """Classify by the sharing actually present in the relation.

    With p the maximum identifiers held by one entity and q the maximum
    entities named by one identifier: both <= 1 is OneOne (the empty
    relation is vacuously so), p > 1 alone shares entities, q > 1 alone
    shares identifiers, both is ManyMany.
    """
    per_entity: dict[str, int] = {}
    per_identifier: dict[str, int] = {}
    for i, e in a.pairs:
        per_entity[e] = per_entity.get(e, 0) + 1
        per_identifier[i] = per_identifier.get(i, 0) + 1
    p = max(per_entity.values(), default=0)
    q = max(per_identifier.values(), default=0)
    if p > 1 and q > 1:
        return CardinalityClass.MANY_MANY
    if p > 1:
        return CardinalityClass.SHARED_ENTITY_MANY_IDS
    if q > 1:
        return CardinalityClass.SHARED_ID_MANY_ENTITIES
    return CardinalityClass.ONE_ONE


def search(a: Association, identifier: str) -> set[str]:
    """All entities paired with ``identifier``; empty when unknown."""
    return {e for i, e in a.pairs if i == identifier}


def unique_entity(a: Association, identifier: str) -> str:
    """The single entity paired with ``identifier``.

    Raises NotFound on zero matches and Ambiguous on several; the latter
    signals the association is not one-one at this identifier.
    """
    found = search(a, identifier)
    if not found:
        raise NotFound(f"identifier {identifier!r} not present in association {a.label!r}")
    if len(found) > 1:
        raise Ambiguous(
            f"identifier {identifier!r} names {len(found)} entities in association {a.label!r}",
            count=len(found),
        )
    return next(iter(found))


def enumerate_association(a: Association) -> Association:
    """Force a shared-identifier relation one-one by numbering.

    Requires every entity to hold exactly one identifier. Each pair
    (i, e) becomes (i + "#" + k, e) where k counts the pairs sharing i
    in entity-id lexicographic order, starting at 1. "#" is outside
    every mask alphabet, so suffixed values cannot collide with plain
    ones. The result always classifies OneOne.
    """
    per_entity: dict[str, int] = {}
    for _, e in a.pairs:
        per_entity[e] = per_entity.get(e, 0) + 1
    offenders = sorted(e for e, n in per_entity.items() if n > 1)
    if offenders:
        raise PreconditionViolated(
            f"entities holding several identifiers: {', '.join(offenders)}"
        )
    groups: dict[str, list[str]] = {}
    for i, e in a.pairs:
        groups.setdefault(i, []).append(e)
    numbered = set()
    for i, members in groups.items():
        for k, e in enumerate(sorted(members), start=1):
            numbered.add((f"{i}#{k}", e))
    return Association(numbered, label=a.label)
