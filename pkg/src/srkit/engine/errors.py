"""Review workflow error codes."""

from __future__ import annotations

from ..store.errors import E_ELEMENT_INACTIVE, E_NOT_FOUND, E_VERSION_STALE

E_TOO_FEW_REVIEWERS = "E_TOO_FEW_REVIEWERS"
E_MANUAL_MODE = "E_MANUAL_MODE"
E_DUPLICATE = "E_DUPLICATE"
E_FORBIDDEN = "E_FORBIDDEN"
E_NOT_ASSIGNED = "E_NOT_ASSIGNED"
E_CRITERION_REQUIRED = "E_CRITERION_REQUIRED"
E_CRITERION_ON_INCLUDE = "E_CRITERION_ON_INCLUDE"
E_PHASE_CLOSED = "E_PHASE_CLOSED"
E_NO_ARBITER = "E_NO_ARBITER"
E_NO_VALIDATOR = "E_NO_VALIDATOR"
E_NO_POLICY = "E_NO_POLICY"
E_BAD_TYPE = "E_BAD_TYPE"
E_CONSTRAINT = "E_CONSTRAINT"
E_MANDATORY_MISSING = "E_MANDATORY_MISSING"
E_MULTIPLICITY = "E_MULTIPLICITY"
E_DEP_VIOLATION = "E_DEP_VIOLATION"
E_NOT_DYNAMIC = "E_NOT_DYNAMIC"
E_DUPLICATE_CHOICE = "E_DUPLICATE_CHOICE"
E_FORMAT = "E_FORMAT"


class EngineError(Exception):
    def __init__(self, code: str, message: str, details: list | dict | None = None):
        self.code = code
        self.details = details
        super().__init__(message)


class ClassificationError(EngineError):
    """Carries the full violation list from classification validation."""

    def __init__(self, violations: list[dict]):
        first = violations[0]
        super().__init__(first["code"], first["message"], details=violations)
        self.violations = violations
