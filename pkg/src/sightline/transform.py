"""Identifier translation across systems, and system-to-system reduction.

A transform table is a total lookup between two schemes, the shape of a
registry query: hand in one identifier, receive the one it maps to.
Tables chain when adjacent schemes agree, and every lookup leaves a
trace entry so a multi-step translation can be audited.

Reduction scores how faithfully one identity management system maps
into another through a table: the fraction of identifiers that land in
the target system, and how often the two systems disagree about which
identifiers share an entity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping

from .core import Identifier
from .errors import NotFound, SchemeMismatch
from .ims import IdentityManagementSystem


@dataclass(frozen=True)
class TransformTable:
    name: str
    from_scheme: str
    to_scheme: str
    rows: Mapping[str, str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", dict(self.rows))


@dataclass(frozen=True)
class TraceStep:
    table: str
    source: str
    target: str


def translate(
    i: Identifier, t: TransformTable, trace: list[TraceStep] | None = None
) -> Identifier:
    """Map ``i`` through one table, appending to ``trace`` when given."""
    if i.scheme != t.from_scheme:
        raise SchemeMismatch(
            f"table {t.name!r} translates {t.from_scheme!r}, got identifier of {i.scheme!r}"
        )
    try:
        target = t.rows[i.value]
    except KeyError:
        raise NotFound(f"identifier {i.value!r} has no row in table {t.name!r}") from None
    if trace is not None:
        trace.append(TraceStep(t.name, i.value, target))
    return Identifier(t.to_scheme, target)


class TransformChain:
    """An ordered, scheme-compatible sequence of transform tables."""

    def __init__(self, steps: list[TransformTable] | tuple[TransformTable, ...] = ()):
        steps = tuple(steps)
        for a, b in zip(steps, steps[1:]):
            if a.to_scheme != b.from_scheme:
                raise SchemeMismatch(
                    f"table {a.name!r} ends in scheme {a.to_scheme!r} but "
                    f"table {b.name!r} starts from {b.from_scheme!r}"
                )
        self.steps = steps

    @property
    def step_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.steps)


@dataclass(frozen=True)
class ChainResult:
    identifier: Identifier
    trace: tuple[TraceStep, ...]


def compose(chain: TransformChain, i: Identifier) -> ChainResult:
    """Apply the chain left to right; the empty chain is the identity.

    A missing row stops the walk and raises NotFound carrying the
    1-based failing step.
    """
    trace: list[TraceStep] = []
    current = i
    for k, table in enumerate(chain.steps, start=1):
        try:
            current = translate(current, table, trace)
        except NotFound as exc:
            raise NotFound(f"step {k} ({table.name}): {exc}", step=k) from None
    return ChainResult(current, tuple(trace))


@dataclass(frozen=True)
class ReductionResult:
    coverage: Fraction
    conflicts: int
    missing: tuple[str, ...]


def reduce_ims(
    a: IdentityManagementSystem,
    b: IdentityManagementSystem,
    t: TransformTable,
) -> ReductionResult:
    """Score how well ``a`` reduces into ``b`` through table ``t``.

    An identifier of ``a`` is covered when the table maps it to an
    identifier present in ``b``; the rest are listed as missing.
    Conflicts count unordered covered pairs on which the systems
    disagree about sharing an entity, in either direction.
    """
    if t.from_scheme != a.scheme.name:
        raise SchemeMismatch(
            f"table {t.name!r} translates {t.from_scheme!r}, system {a.name!r} "
            f"uses {a.scheme.name!r}"
        )
    if t.to_scheme != b.scheme.name:
        raise SchemeMismatch(
            f"table {t.name!r} targets {t.to_scheme!r}, system {b.name!r} "
            f"uses {b.scheme.name!r}"
        )

    ids_a = sorted(a.assoc.identifiers)
    ids_b = b.assoc.identifiers
    covered = [i for i in ids_a if i in t.rows and t.rows[i] in ids_b]
    missing = tuple(i for i in ids_a if i not in t.rows or t.rows[i] not in ids_b)
    coverage = Fraction(len(covered), len(ids_a)) if ids_a else Fraction(1)

    conflicts = 0
    for i1, i2 in combinations(covered, 2):
        same_in_a = a.identity_authenticate(i1, i2)
        same_in_b = b.identity_authenticate(t.rows[i1], t.rows[i2])
        if same_in_a != same_in_b:
            conflicts += 1

    return ReductionResult(coverage, conflicts, missing)
