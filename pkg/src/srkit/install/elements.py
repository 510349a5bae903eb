"""Schema elements: stable identities and descriptors for installed projects.

Every declared phase, role, exclusion criterion, category, and choice
becomes one schema element with a qualified id (e.g. ``category.scope`` or
``category.scope.choice.model_level``). Descriptors are immutable once
introduced; editing a declaration produces a new element under a
version-suffixed id (``category.scope@v3``) so data stays attached to the
old element.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..dsl.model import (
    CategoryDecl,
    DynamicListKind,
    ListKind,
    SimpleKind,
    ValidatedModel,
    slugify,
)
from ..dsl.graph import dependency_graph

ACTIVE = "active"
DEACTIVATED = "deactivated"

_VERSION_SUFFIX = re.compile(r"@v[0-9]+")


@dataclass
class SchemaElement:
    id: str
    kind: str  # phase | role | criterion | category | choice
    descriptor: dict
    introduced_in: int
    status: str = ACTIVE
    deactivated_in: int | None = None

    @property
    def natural_id(self) -> str:
        return natural_id(self.id)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "descriptor": self.descriptor,
            "introduced_in": self.introduced_in,
            "status": self.status,
            "deactivated_in": self.deactivated_in,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SchemaElement":
        return cls(
            id=d["id"],
            kind=d["kind"],
            descriptor=d["descriptor"],
            introduced_in=d["introduced_in"],
            status=d["status"],
            deactivated_in=d.get("deactivated_in"),
        )


@dataclass
class ProjectSchema:
    project_id: str
    version: int
    elements: list[SchemaElement] = field(default_factory=list)
    policies: dict = field(default_factory=dict)

    def by_id(self) -> dict[str, SchemaElement]:
        return {e.id: e for e in self.elements}

    def active(self, kind: str | None = None):
        return [
            e
            for e in self.elements
            if e.status == ACTIVE and (kind is None or e.kind == kind)
        ]

    def active_by_natural(self) -> dict[str, SchemaElement]:
        return {e.natural_id: e for e in self.elements if e.status == ACTIVE}

    def find_active_category(self, name: str) -> SchemaElement | None:
        for e in self.active("category"):
            if e.descriptor["name"] == name:
                return e
        return None

    def to_dict(self) -> dict:
        return {
            "project_id": self.project_id,
            "version": self.version,
            "elements": [e.to_dict() for e in self.elements],
            "policies": self.policies,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProjectSchema":
        return cls(
            project_id=d["project_id"],
            version=d["version"],
            elements=[SchemaElement.from_dict(e) for e in d["elements"]],
            policies=d.get("policies", {}),
        )


def empty_schema(project_id: str) -> ProjectSchema:
    return ProjectSchema(project_id=project_id, version=0)


def natural_id(element_id: str) -> str:
    """Identity of an element ignoring version suffixes introduced by edits."""
    return _VERSION_SUFFIX.sub("", element_id)


def role_id(name: str) -> str:
    return f"role.{name}"


def phase_id(name: str) -> str:
    return f"phase.{name}"


def criterion_id(text: str) -> str:
    return f"criterion.{slugify(text)}"


def category_id(name: str) -> str:
    return f"category.{name}"


def choice_id(category_element_id: str, value: str) -> str:
    return f"{category_element_id}.choice.{slugify(value)}"


def role_descriptor(name: str, rank: str) -> dict:
    return {"kind": "role", "name": name, "rank": rank}


def phase_descriptor(name: str, evidence: str) -> dict:
    return {"kind": "phase", "name": name, "evidence": evidence}


def criterion_descriptor(text: str) -> dict:
    return {"kind": "criterion", "text": text}


def category_descriptor(cat: CategoryDecl, parent: str | None) -> dict:
    d: dict = {
        "kind": "category",
        "name": cat.name,
        "title": cat.title,
        "parent": parent,
        "mandatory": cat.mandatory,
        "multiplicity": cat.multiplicity,
        "depends_on": None,
    }
    if cat.depends_on is not None:
        d["depends_on"] = {
            "parent": cat.depends_on.parent,
            "mapping": {k: list(v) for k, v in cat.depends_on.mapping.items()},
        }
    k = cat.kind
    if isinstance(k, SimpleKind):
        d["category_kind"] = "simple"
        d["value_type"] = k.value_type
        d["max_length"] = k.max_length
        d["pattern"] = k.pattern
        d["range"] = list(k.range) if k.range is not None else None
    elif isinstance(k, ListKind):
        # The fixed choice set is part of a list category's type.
        d["category_kind"] = "list"
        d["choices"] = list(k.choices)
    else:
        # Dynamic lists manage their choices as elements; the initial set is
        # only a seed and not part of the category's identity.
        d["category_kind"] = "dynamiclist"
    return d


def choice_descriptor(category_element_id: str, value: str, origin: str = "model") -> dict:
    return {
        "kind": "choice",
        "category": category_element_id,
        "value": value,
        "origin": origin,
    }


@dataclass
class DeclaredElement:
    natural: str
    kind: str
    descriptor: dict
    # For choices: natural id of the owning category.
    category_natural: str | None = None
    choice_value: str | None = None
    choice_origin: str = "model"


def declared_elements(vm: ValidatedModel) -> list[DeclaredElement]:
    """Flatten a validated model into declared elements.

    Roles, phases and criteria come first in declaration order; categories
    follow in dependency order, each immediately followed by its declared
    choices. Choice descriptors are completed later (their category field
    depends on the target element id chosen by the diff).
    """
    out: list[DeclaredElement] = []
    for role in vm.project.roles:
        out.append(DeclaredElement(role_id(role.name), "role", role_descriptor(role.name, role.rank)))
    for phase in vm.screening.phases:
        out.append(
            DeclaredElement(phase_id(phase.name), "phase", phase_descriptor(phase.name, phase.evidence))
        )
    for crit in vm.screening.exclusion_criteria:
        out.append(
            DeclaredElement(criterion_id(crit.text), "criterion", criterion_descriptor(crit.text))
        )
    cats = vm.model.categories_by_name()
    parents = {cat.name: parent for cat, parent, _ in vm.model.iter_categories()}
    for name in dependency_graph(vm):
        cat = cats[name]
        out.append(
            DeclaredElement(
                category_id(name), "category", category_descriptor(cat, parents[name])
            )
        )
        for value in cat.choice_values():
            out.append(
                DeclaredElement(
                    natural=f"{category_id(name)}.choice.{slugify(value)}",
                    kind="choice",
                    descriptor={},  # filled in once the category element id is known
                    category_natural=category_id(name),
                    choice_value=value,
                )
            )
    return out


def policies_doc(vm: ValidatedModel) -> dict:
    s = vm.screening
    doc: dict = {
        "label": vm.project.label,
        "assignment": {
            "mode": s.assignment.mode,
            "reviewers_per_paper": s.assignment.reviewers_per_paper,
        },
        "conflict": {
            "strategy": s.conflict.strategy,
            "arbiter_role": s.conflict.arbiter_role,
        },
        "validation": None,
    }
    if s.validation is not None:
        doc["validation"] = {
            "percentage": s.validation.percentage,
            "target": s.validation.target,
            "validator_role": s.validation.validator_role,
        }
    return doc
