"""Identity management systems: issue, revoke, and authenticate identifiers.

A system owns one scheme and one entity-identifier association. It is a
single-writer state machine: generate/revoke/bind are serialized by the
caller, reads may run concurrently between mutations.

Two authentication questions are answered: whether an identifier is
associated with a given entity, and whether two identifiers share an
entity. The second is decided by nonempty intersection of the entity
sets, which coincides with "same unique entity" whenever the underlying
association is one-one.

Also here: the probabilistic stand-in for biometric identity, a
similarity score over fixed-length binary feature vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .associations import Association, search
from .core import Entity, Identifier, Scheme, validate_format
from .errors import FormatMismatch, LengthMismatch, SchemeExhausted


def _entity_id(e: Entity | str) -> str:
    return e.id if isinstance(e, Entity) else e


def _value(i: Identifier | str) -> str:
    return i.value if isinstance(i, Identifier) else i


def render_serial(scheme: Scheme, index: int) -> str:
    """Render ``index`` into the mask's fillable positions.

    The fillable positions form a mixed-radix number, most significant
    first, each position drawing from its own class alphabet; literals
    are emitted verbatim. ``index`` must be < scheme.capacity.
    """
    chars: list[str] = []
    v = index
    for slot in reversed(scheme.slots):
        if slot.kind == "literal":
            chars.append(slot.literal)
        else:
            size = len(slot.alphabet)
            chars.append(slot.alphabet[v % size])
            v //= size
    return "".join(reversed(chars))


class IdentityManagementSystem:
    """Creates and deletes identifiers for entities under one scheme."""

    def __init__(self, name: str, scheme: Scheme):
        self.name = name
        self.scheme = scheme
        self.serial = 0
        self._pairs: set[tuple[str, str]] = set()
        # Every value ever issued or bound; generate never re-emits one.
        self._seen: set[str] = set()
        self.revocations: list[str] = []

    @property
    def assoc(self) -> Association:
        return Association(self._pairs, label=self.name)

    def bind(self, e: Entity | str, value: str) -> Identifier:
        """Attach a pre-existing identifier value to an entity."""
        result = validate_format(value, self.scheme)
        if not result.valid:
            raise FormatMismatch(
                f"{value!r} does not match scheme {self.scheme.name} ({self.scheme.mask})"
            )
        assert result.canonical is not None
        self._pairs.add((result.canonical, _entity_id(e)))
        self._seen.add(result.canonical)
        return Identifier(self.scheme.name, result.canonical)

    def generate(self, e: Entity | str) -> Identifier:
        """Issue a fresh identifier for ``e``, deterministic from the serial.

        Serial n renders as ``n mod capacity`` in the mask's mixed radix,
        so runs are reproducible; values already bound are skipped. The
        serial strictly increases and never wraps, so a revoked value is
        never reissued.
        """
        capacity = self.scheme.capacity
        while True:
            nxt = self.serial + 1
            if nxt > capacity:
                raise SchemeExhausted(
                    f"scheme {self.scheme.name} capacity {capacity} exhausted in system {self.name}"
                )
            self.serial = nxt
            value = render_serial(self.scheme, nxt % capacity)
            if value not in self._seen:
                break
        self._pairs.add((value, _entity_id(e)))
        self._seen.add(value)
        return Identifier(self.scheme.name, value)

    def revoke(self, i: Identifier | str) -> bool:
        """Remove every pair holding ``i``; report whether any existed."""
        value = _value(i)
        removed = {p for p in self._pairs if p[0] == value}
        if not removed:
            return False
        self._pairs -= removed
        self.revocations.append(value)
        return True

    def entity_authenticate(self, e: Entity | str, i: Identifier | str) -> bool:
        return (_value(i), _entity_id(e)) in self._pairs

    def identity_authenticate(self, i1: Identifier | str, i2: Identifier | str) -> bool:
        a = self.assoc
        return bool(search(a, _value(i1)) & search(a, _value(i2)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IdentityManagementSystem):
            return NotImplemented
        return (
            self.name == other.name
            and self.scheme == other.scheme
            and self.serial == other.serial
            and self._pairs == other._pairs
            and self._seen == other._seen
            and self.revocations == other.revocations
        )

    def __repr__(self) -> str:
        return (
            f"IdentityManagementSystem({self.name!r}, scheme={self.scheme.name!r}, "
            f"serial={self.serial}, pairs={len(self._pairs)})"
        )


@dataclass(frozen=True)
class BiometricProfile:
    """Fixed-length binary feature vector measured from one subject."""

    subject: str
    features: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "features", tuple(self.features))
        if any(f not in (0, 1) for f in self.features):
            raise ValueError("biometric features must be binary")


@dataclass(frozen=True)
class MatchResult:
    score: Fraction
    match: bool


def biometric_match(
    p: BiometricProfile, q: BiometricProfile, threshold: Fraction | float
) -> MatchResult:
    """Score two profiles by normalized agreement and compare to a threshold.

    score = 1 - hamming_distance / n, exact rational arithmetic; a match
    is declared when score >= threshold. Profiles must be the same length.
    """
    if len(p.features) != len(q.features):
        raise LengthMismatch(
            f"profiles of {p.subject!r} and {q.subject!r} have lengths "
            f"{len(p.features)} and {len(q.features)}"
        )
    n = len(p.features)
    if n == 0:
        raise LengthMismatch("profiles must have at least one feature")
    distance = sum(1 for a, b in zip(p.features, q.features) if a != b)
    score = Fraction(n - distance, n)
    return MatchResult(score, score >= threshold)
