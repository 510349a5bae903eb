"""Abstract model of the review-procedure configuration language.

The model mirrors the three-part structure of a project configuration:
project identity and roles, screening policies, and the classification
scheme. Source locations are attached to every declaration but are
excluded from equality, so two models parsed from differently formatted
sources compare equal when they describe the same configuration.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

IDENT_RE = re.compile(r"^[a-z][a-z0-9_]{0,31}$")

# Role ranks, weakest to strongest.
RANKS = ("reviewer", "senior", "admin")

EVIDENCE_KINDS = ("metadata", "abstract", "fulltext")
ASSIGN_MODES = ("automatic", "manual")
CONFLICT_STRATEGIES = ("unanimity", "majority", "arbiter")
VALIDATION_TARGETS = ("excluded", "included", "all")
VALUE_TYPES = ("text", "bool", "int", "real", "date")

# Multiplicity sentinel: a category suffixed [0] accepts unlimited values.
UNBOUNDED = 0

# Maximum allowed nesting depth for subcategories.
MAX_NESTING_DEPTH = 5


@dataclass(frozen=True)
class Loc:
    """1-based line/column position in the source text."""

    line: int
    column: int


@dataclass
class SourceText:
    origin: str
    content: str


@dataclass
class RoleDecl:
    name: str
    rank: str  # one of RANKS
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass
class ProjectDecl:
    name: str
    label: str
    roles: list[RoleDecl]
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass
class PhaseDecl:
    name: str
    evidence: str  # one of EVIDENCE_KINDS
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass
class AssignmentPolicy:
    mode: str  # one of ASSIGN_MODES
    reviewers_per_paper: int
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass
class ConflictPolicy:
    strategy: str  # one of CONFLICT_STRATEGIES
    arbiter_role: str | None = None
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass
class ValidationPolicy:
    percentage: float  # rational in (0, 100]
    target: str  # one of VALIDATION_TARGETS
    validator_role: str
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass
class CriterionDecl:
    text: str
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass
class ScreeningDecl:
    phases: list[PhaseDecl]
    assignment: AssignmentPolicy
    conflict: ConflictPolicy
    validation: ValidationPolicy | None
    exclusion_criteria: list[CriterionDecl]
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass
class SimpleKind:
    value_type: str  # one of VALUE_TYPES
    max_length: int | None = None
    pattern: str | None = None
    range: tuple[float, float] | None = None


@dataclass
class ListKind:
    choices: list[str]


@dataclass
class DynamicListKind:
    initial_choices: list[str]


@dataclass
class DependencyRef:
    parent: str  # category name; must be a list or dynamiclist category
    mapping: dict[str, list[str]]  # parent choice -> allowed own choices
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass
class CategoryDecl:
    name: str
    title: str
    kind: SimpleKind | ListKind | DynamicListKind
    mandatory: bool = False
    multiplicity: int = 1  # UNBOUNDED (0) means unlimited values
    depends_on: DependencyRef | None = None
    subcategories: list[CategoryDecl] = field(default_factory=list)
    loc: Loc | None = field(default=None, compare=False, repr=False)

    def choice_values(self) -> list[str]:
        if isinstance(self.kind, ListKind):
            return list(self.kind.choices)
        if isinstance(self.kind, DynamicListKind):
            return list(self.kind.initial_choices)
        return []


@dataclass
class SchemeDecl:
    categories: list[CategoryDecl]
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass
class ConfigModel:
    project: ProjectDecl
    screening: ScreeningDecl
    scheme: SchemeDecl

    def iter_categories(self):
        """Yield (category, parent_name, depth) in declaration (pre-order) order."""

        def walk(cats, parent, depth):
            for cat in cats:
                yield cat, parent, depth
                yield from walk(cat.subcategories, cat.name, depth + 1)

        yield from walk(self.scheme.categories, None, 1)

    def categories_by_name(self) -> dict[str, CategoryDecl]:
        return {cat.name: cat for cat, _, _ in self.iter_categories()}


@dataclass(frozen=True)
class ValidatedModel:
    """Wrapper certifying that a model passed semantic validation.

    Only ``srkit.dsl.validator.validate`` should construct these.
    """

    model: ConfigModel

    @property
    def project(self) -> ProjectDecl:
        return self.model.project

    @property
    def screening(self) -> ScreeningDecl:
        return self.model.screening

    @property
    def scheme(self) -> SchemeDecl:
        return self.model.scheme


def slugify(text: str) -> str:
    """Stable storage key for a free-text label (criterion texts, choice values)."""
    s = re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_")
    return s or "item"
