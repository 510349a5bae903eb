"""Screening workflow: imports, assignment, decisions, conflicts,
validation sampling, classification, and per-phase statistics."""

from .assign import balanced_assignment
from .classify import validate_values, value_refs
from .conflicts import resolve_verdicts
from .core import (
    ARBITRATION,
    ASSIGNMENT,
    AUDIT,
    CLASSIFICATION,
    CONFLICT,
    DECISION,
    PHASE_STATE,
    SCREENING,
    VALIDATION,
    ReviewEngine,
    validation_share,
)
from .errors import (
    E_BAD_TYPE,
    E_CONSTRAINT,
    E_CRITERION_ON_INCLUDE,
    E_CRITERION_REQUIRED,
    E_DEP_VIOLATION,
    E_DUPLICATE,
    E_DUPLICATE_CHOICE,
    E_FORBIDDEN,
    E_FORMAT,
    E_MANDATORY_MISSING,
    E_MANUAL_MODE,
    E_MULTIPLICITY,
    E_NO_ARBITER,
    E_NO_POLICY,
    E_NO_VALIDATOR,
    E_NOT_ASSIGNED,
    E_NOT_DYNAMIC,
    E_NOT_FOUND,
    E_PHASE_CLOSED,
    E_TOO_FEW_REVIEWERS,
    ClassificationError,
    EngineError,
)
from .imports import CSV_HEADER, normalized_title_year, parse_bibtex, parse_csv
from .rng import SplitMix64
from .stats import PhaseStats, stats_from_csv, stats_to_csv, stats_to_json

__all__ = [
    "ARBITRATION",
    "ASSIGNMENT",
    "AUDIT",
    "CLASSIFICATION",
    "CONFLICT",
    "CSV_HEADER",
    "DECISION",
    "PHASE_STATE",
    "SCREENING",
    "VALIDATION",
    "ClassificationError",
    "EngineError",
    "PhaseStats",
    "ReviewEngine",
    "SplitMix64",
    "balanced_assignment",
    "normalized_title_year",
    "parse_bibtex",
    "parse_csv",
    "resolve_verdicts",
    "stats_from_csv",
    "stats_to_csv",
    "stats_to_json",
    "validate_values",
    "validation_share",
    "value_refs",
    "E_BAD_TYPE",
    "E_CONSTRAINT",
    "E_CRITERION_ON_INCLUDE",
    "E_CRITERION_REQUIRED",
    "E_DEP_VIOLATION",
    "E_DUPLICATE",
    "E_DUPLICATE_CHOICE",
    "E_FORBIDDEN",
    "E_FORMAT",
    "E_MANDATORY_MISSING",
    "E_MANUAL_MODE",
    "E_MULTIPLICITY",
    "E_NO_ARBITER",
    "E_NO_POLICY",
    "E_NO_VALIDATOR",
    "E_NOT_ASSIGNED",
    "E_NOT_DYNAMIC",
    "E_NOT_FOUND",
    "E_PHASE_CLOSED",
    "E_TOO_FEW_REVIEWERS",
]
