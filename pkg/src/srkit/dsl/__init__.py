"""Review-procedure configuration language: parse, validate, print, analyze."""

from .diagnostics import Diagnostic, DslError
from .graph import dependency_graph
from .model import (
    UNBOUNDED,
    AssignmentPolicy,
    CategoryDecl,
    ConfigModel,
    ConflictPolicy,
    CriterionDecl,
    DependencyRef,
    DynamicListKind,
    ListKind,
    Loc,
    PhaseDecl,
    ProjectDecl,
    RoleDecl,
    SchemeDecl,
    ScreeningDecl,
    SimpleKind,
    SourceText,
    ValidatedModel,
    ValidationPolicy,
    slugify,
)
from .parser import parse
from .printer import pretty_print
from .validator import validate

__all__ = [
    "AssignmentPolicy",
    "CategoryDecl",
    "ConfigModel",
    "ConflictPolicy",
    "CriterionDecl",
    "DependencyRef",
    "Diagnostic",
    "DslError",
    "DynamicListKind",
    "ListKind",
    "Loc",
    "PhaseDecl",
    "ProjectDecl",
    "RoleDecl",
    "SchemeDecl",
    "ScreeningDecl",
    "SimpleKind",
    "SourceText",
    "UNBOUNDED",
    "ValidatedModel",
    "ValidationPolicy",
    "dependency_graph",
    "parse",
    "pretty_print",
    "slugify",
    "validate",
]
