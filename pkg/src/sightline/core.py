"""Core model: entities, identifier schemes, observation events, accounts.

A scheme is a named format mask. Mask symbols:

    L   uppercase letter
    D   digit
    A   alphanumeric (digit or uppercase letter)
    x   any other character is itself, a literal

A symbol may be followed by ``{n}`` to repeat it n times, so ``D{9}``
is nine digits. Canonical identifier values are uppercase with display
separators (space and hyphen) stripped; ``display_groups`` describes how
a canonical value is regrouped for humans, e.g. (3, 3, 4).

All types here are immutable values and safe to share between tasks.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

from .errors import DuplicateName, SchemeError

# Characters removed when canonicalizing a presented value.
SEPARATORS = " -"

_CLASS_ALPHABETS = {
    "L": "ABCDEFGHIJKLMNOPQRSTUVWXYZ",
    "D": "0123456789",
    "A": "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ",
}


class EntityKind(enum.Enum):
    PERSON = "person"
    VEHICLE = "vehicle"
    DEVICE = "device"
    ACCOUNT_HOLDER = "account-holder"
    OTHER = "other"


@dataclass(frozen=True)
class Entity:
    """A person or object that possesses observable behaviour."""

    id: str
    kind: EntityKind = EntityKind.OTHER

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("entity id must be non-empty")


@dataclass(frozen=True)
class MaskSlot:
    """One expanded mask position: a character class or a literal."""

    kind: str  # "L", "D", "A", or "literal"
    literal: str = ""

    def accepts(self, ch: str) -> bool:
        if self.kind == "literal":
            return ch == self.literal
        return ch in _CLASS_ALPHABETS[self.kind]

    @property
    def alphabet(self) -> str:
        if self.kind == "literal":
            return self.literal
        return _CLASS_ALPHABETS[self.kind]


def _expand_mask(mask: str) -> tuple[MaskSlot, ...]:
    """Parse a mask string into its expanded slot sequence."""
    slots: list[MaskSlot] = []
    i = 0
    while i < len(mask):
        ch = mask[i]
        if ch in "{}":
            raise SchemeError(f"mask {mask!r}: repetition braces must follow a symbol")
        if ch in _CLASS_ALPHABETS:
            slot = MaskSlot(ch)
        else:
            slot = MaskSlot("literal", ch.upper())
        i += 1
        count = 1
        if i < len(mask) and mask[i] == "{":
            close = mask.find("}", i)
            if close < 0:
                raise SchemeError(f"mask {mask!r}: unterminated repetition")
            digits = mask[i + 1 : close]
            if not digits.isdigit() or int(digits) < 1:
                raise SchemeError(f"mask {mask!r}: repetition count must be an integer >= 1")
            count = int(digits)
            i = close + 1
        slots.extend([slot] * count)
    if not slots:
        raise SchemeError("mask must expand to at least one position")
    return tuple(slots)


@dataclass(frozen=True)
class Scheme:
    """A named identifier format: mask plus optional display grouping."""

    name: str
    mask: str
    display_groups: tuple[int, ...] | None = None
    slots: tuple[MaskSlot, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.name:
            raise SchemeError("scheme name must be non-empty")
        slots = _expand_mask(self.mask)
        object.__setattr__(self, "slots", slots)
        if self.display_groups is not None:
            groups = tuple(self.display_groups)
            object.__setattr__(self, "display_groups", groups)
            if any(g < 1 for g in groups):
                raise SchemeError(f"scheme {self.name}: display groups must be positive")
            if sum(groups) != len(slots):
                raise SchemeError(
                    f"scheme {self.name}: display groups sum to {sum(groups)}, "
                    f"mask expands to {len(slots)} positions"
                )

    @property
    def length(self) -> int:
        return len(self.slots)

    @property
    def capacity(self) -> int:
        """Number of distinct values the mask admits."""
        n = 1
        for slot in self.slots:
            if slot.kind != "literal":
                n *= len(slot.alphabet)
        return n

    def identifier(self, value: str) -> "Identifier":
        """Canonicalize ``value`` and wrap it, or raise ValueError."""
        result = validate_format(value, self)
        if not result.valid:
            raise ValueError(f"{value!r} does not match scheme {self.name} ({self.mask})")
        assert result.canonical is not None
        return Identifier(self.name, result.canonical)


@dataclass(frozen=True)
class Identifier:
    """A canonical symbol string under a named scheme."""

    scheme: str
    value: str


@dataclass(frozen=True)
class ValidationResult:
    valid: bool
    canonical: str | None = None


def canonicalize(value: str) -> str:
    """Strip display separators and fold to uppercase."""
    return "".join(ch for ch in value if ch not in SEPARATORS).upper()


def validate_format(value: str, scheme: Scheme) -> ValidationResult:
    """Check ``value`` against the scheme mask.

    The value is canonicalized first (separators stripped, uppercased),
    then matched position by position against the expanded mask. Returns
    the canonical form on success; never raises for bad values.
    """
    canonical = canonicalize(value)
    if len(canonical) != scheme.length:
        return ValidationResult(False)
    for ch, slot in zip(canonical, scheme.slots):
        if not slot.accepts(ch):
            return ValidationResult(False)
    return ValidationResult(True, canonical)


def format_for_display(identifier: Identifier, scheme: Scheme) -> str:
    """Regroup a canonical value per the scheme's display groups.

    Identity when the scheme declares no groups. Inverse of
    canonicalization: validating the display form yields the original
    canonical value.
    """
    if scheme.name != identifier.scheme:
        raise ValueError(f"identifier carries scheme {identifier.scheme!r}, not {scheme.name!r}")
    if scheme.display_groups is None:
        return identifier.value
    parts = []
    pos = 0
    for g in scheme.display_groups:
        parts.append(identifier.value[pos : pos + g])
        pos += g
    return " ".join(parts)


# Standard citizenship-document schemes used by the CLI's validate command.
STANDARD_SCHEMES: Mapping[str, Scheme] = {
    s.name: s
    for s in (
        Scheme("NI", "LLDDDDDDL"),
        Scheme("PASSPORT", "D{9}"),
        Scheme("NHS", "A{10}", display_groups=(3, 3, 4)),
        Scheme("LICENCE", "A{18}"),
    )
}


@dataclass(frozen=True)
class ObservationEvent:
    """A timestamped, located raw observation.

    ``truth`` is a test-oracle annotation naming the entity that really
    produced the event; no pipeline code may read it.
    """

    t: int
    loc: str
    payload: Mapping[str, str]
    truth: str | None = None

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError("event timestamp must be >= 0")
        if not self.payload:
            raise ValueError("event payload must be non-empty")
        object.__setattr__(self, "payload", dict(self.payload))


@dataclass(frozen=True)
class Credentials:
    user_name: str
    password_hash: str


@dataclass(frozen=True)
class CustomerAccount:
    """Access key, holder details, and an append-only transaction history."""

    credentials: Credentials
    details: Mapping[str, str]
    history: tuple[str, ...] = ()

    def record_transaction(self, entry: str) -> "CustomerAccount":
        return CustomerAccount(self.credentials, dict(self.details), self.history + (entry,))


@dataclass(frozen=True)
class SocialMediaAccount:
    """Access key, personal profile, and an append-only interaction history."""

    credentials: Credentials
    profile: Mapping[str, str]
    interactions: tuple[str, ...] = ()

    def record_interaction(self, entry: str) -> "SocialMediaAccount":
        return SocialMediaAccount(self.credentials, dict(self.profile), self.interactions + (entry,))


class Provider:
    """One service provider; enforces unique credentials per provider."""

    def __init__(self, name: str):
        self.name = name
        self._accounts: dict[str, CustomerAccount | SocialMediaAccount] = {}

    def register(self, account: CustomerAccount | SocialMediaAccount) -> None:
        user = account.credentials.user_name
        if user in self._accounts:
            raise DuplicateName(user, 0)
        self._accounts[user] = account

    def account(self, user_name: str) -> CustomerAccount | SocialMediaAccount | None:
        return self._accounts.get(user_name)

    def replace(self, account: CustomerAccount | SocialMediaAccount) -> None:
        """Swap in a grown history for an already registered account."""
        user = account.credentials.user_name
        if user not in self._accounts:
            raise KeyError(user)
        self._accounts[user] = account
