"""Error taxonomy shared across the library.

Every failure a caller is expected to handle is a subclass of
:class:`DomainError`. The CLI maps any DomainError to exit code 1 and
prints ``<ClassName>: <message>`` with no traceback, so class names are
part of the public surface and stay stable.
"""

from __future__ import annotations


class DomainError(Exception):
    """Base class for all recoverable errors raised by this package."""

    @property
    def name(self) -> str:
        return type(self).__name__


class SchemeError(DomainError):
    """A scheme declaration is malformed (bad mask, bad display groups)."""


class NotFound(DomainError):
    """A lookup had zero matches (unknown identifier, missing table row)."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class Ambiguous(DomainError):
    """A lookup expected one match but found several."""

    def __init__(self, message: str, count: int):
        super().__init__(message)
        self.count = count


class PreconditionViolated(DomainError):
    """An operation's stated precondition does not hold for its input."""


class SchemeExhausted(DomainError):
    """An identifier scheme has no unused values left to generate."""


class LengthMismatch(DomainError):
    """Two feature vectors that must be the same length are not."""


class CycleDetected(DomainError):
    """Adding a support edge would make the identity graph cyclic."""


class UnknownNode(DomainError):
    """A node id does not exist in the identity graph."""


class InvalidNode(DomainError):
    """Reliability was requested for a node that does not evaluate valid."""


class MissingField(DomainError):
    """An observation event lacks the payload field being extracted."""


class FormatMismatch(DomainError):
    """A value does not match the scheme mask it must conform to."""


class UnknownAttribute(DomainError):
    """A sorting key names an attribute the report was not built with."""


class SchemeMismatch(DomainError):
    """An identifier or table was used against the wrong scheme."""


class ScenarioSyntaxError(DomainError):
    """Scenario text violates the grammar."""

    def __init__(self, line: int, column: int, expected: str):
        super().__init__(f"line {line}, column {column}: expected {expected}")
        self.line = line
        self.column = column
        self.expected = expected


class UnresolvedReference(DomainError):
    """A declaration refers to a name that is never declared."""

    def __init__(self, ref: str, line: int):
        super().__init__(f"line {line}: unresolved reference {ref!r}")
        self.ref = ref
        self.line = line


class DuplicateName(DomainError):
    """Two declarations of the same kind reuse a name."""

    def __init__(self, dup: str, line: int):
        super().__init__(f"line {line}: duplicate name {dup!r}")
        self.dup = dup
        self.line = line


class MalformedLine(DomainError):
    """A line of a record file (event log, CSV table) cannot be parsed."""

    def __init__(self, line: int, reason: str = ""):
        detail = f": {reason}" if reason else ""
        super().__init__(f"line {line}{detail}")
        self.line = line
        self.reason = reason


class IoError(DomainError):
    """A file could not be read or written."""


class VersionMismatch(DomainError):
    """A snapshot was written by an incompatible schema version."""


class CorruptSnapshot(DomainError):
    """A snapshot file is truncated or structurally damaged."""

    def __init__(self, offset: int, reason: str = ""):
        detail = f": {reason}" if reason else ""
        super().__init__(f"at offset {offset}{detail}")
        self.offset = offset
