"""Abstract modelling of identifiers, identity systems, and observation.

The package splits into small pure modules:

- ``core``: identifier schemes (masks), canonical values, entities, events
- ``associations``: identifier/entity relations and their cardinality
- ``ims``: identity management systems, generation, authentication
- ``provenance``: support DAGs between identifiers, validity, reliability
- ``surveillance``: event streams to attribute reports and categories
- ``transform``: cross-system identifier translation and reduction
- ``io``: scenario DSL, event logs, reports, snapshots (all file access)
- ``cli``: the ``sightline`` command
"""

from .associations import (
    Association,
    CardinalityClass,
    classify_cardinality,
    enumerate_association,
    search,
    unique_entity,
)
from .core import (
    Entity,
    EntityKind,
    Identifier,
    ObservationEvent,
    STANDARD_SCHEMES,
    Scheme,
    ValidationResult,
    canonicalize,
    format_for_display,
    validate_format,
)
from .errors import DomainError
from .ims import (
    BiometricProfile,
    IdentityManagementSystem,
    MatchResult,
    biometric_match,
)
from .provenance import (
    IdentityGraph,
    IdentityNode,
    SourceKind,
    add_support,
    evaluate_reliability,
    evaluate_validity,
    provenance_paths,
)
from .surveillance import (
    AttributeDef,
    Category,
    Comparator,
    ReportEntry,
    SortingReport,
    SurveillanceReport,
    WatchContext,
    assemble_sessions,
    extract_identifier,
    is_subcategory,
    recognize_attributes,
    social_sort,
    surveil,
)
from .transform import (
    ChainResult,
    TransformChain,
    TransformTable,
    compose,
    reduce_ims,
    translate,
)

__version__ = "0.1.0"

__all__ = [
    "Association",
    "AttributeDef",
    "BiometricProfile",
    "CardinalityClass",
    "Category",
    "ChainResult",
    "Comparator",
    "DomainError",
    "Entity",
    "EntityKind",
    "Identifier",
    "IdentityGraph",
    "IdentityManagementSystem",
    "IdentityNode",
    "MatchResult",
    "ObservationEvent",
    "ReportEntry",
    "STANDARD_SCHEMES",
    "Scheme",
    "SortingReport",
    "SourceKind",
    "SurveillanceReport",
    "ValidationResult",
    "WatchContext",
    "add_support",
    "assemble_sessions",
    "biometric_match",
    "canonicalize",
    "classify_cardinality",
    "compose",
    "enumerate_association",
    "evaluate_reliability",
    "evaluate_validity",
    "extract_identifier",
    "format_for_display",
    "is_subcategory",
    "provenance_paths",
    "recognize_attributes",
    "reduce_ims",
    "search",
    "social_sort",
    "surveil",
    "translate",
    "unique_entity",
    "validate_format",
]
