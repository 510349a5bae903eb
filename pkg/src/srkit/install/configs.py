"""Per-entity operation configurations.

Controllers and views are generic; everything entity-specific lives in an
``EntityConfig``: the attribute list, the enabled operations, and the page
template each operation binds to. Built-in entities (papers, users,
members, screening decisions) are the same for every project; the
classification config and the per-category configs follow the installed
schema.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import elements as el

OPERATIONS = ("add", "modify", "remove", "list", "view")

PAGE_TEMPLATES = {
    "add": "entity_form",
    "modify": "entity_form",
    "remove": "entity_confirm",
    "list": "entity_list",
    "view": "entity_view",
}


@dataclass
class Attribute:
    name: str
    semantic_type: str
    constraints: dict = field(default_factory=dict)
    writable: bool = True
    element: str | None = None  # schema element id, for schema-derived attributes

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "type": self.semantic_type,
            "constraints": self.constraints,
            "writable": self.writable,
            "element": self.element,
        }


@dataclass
class EntityConfig:
    entity: str
    attributes: list[Attribute]
    operations: tuple[str, ...]
    page_bindings: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.page_bindings:
            self.page_bindings = {op: PAGE_TEMPLATES[op] for op in self.operations}

    def attributes_for(self, operation: str) -> list[Attribute]:
        if operation in ("add", "modify"):
            return [a for a in self.attributes if a.writable]
        return list(self.attributes)

    def to_dict(self) -> dict:
        return {
            "entity": self.entity,
            "attributes": [a.to_dict() for a in self.attributes],
            "operations": list(self.operations),
            "page_bindings": dict(self.page_bindings),
        }


def _text(name: str, **constraints) -> Attribute:
    return Attribute(name, "text", constraints)


def paper_config() -> EntityConfig:
    return EntityConfig(
        entity="paper",
        attributes=[
            _text("bibkey"),
            _text("title"),
            _text("authors"),
            _text("venue"),
            Attribute("year", "int"),
            _text("abstract"),
            _text("link"),
        ],
        operations=OPERATIONS,
    )


def user_config() -> EntityConfig:
    return EntityConfig(
        entity="user",
        attributes=[_text("username")],
        operations=("add", "modify", "list", "view"),
    )


def member_config() -> EntityConfig:
    return EntityConfig(
        entity="member",
        attributes=[_text("user"), _text("role")],
        operations=OPERATIONS,
    )


def decision_config() -> EntityConfig:
    # Decisions are an audit trail: revisable, never removable.
    return EntityConfig(
        entity="screening_decision",
        attributes=[
            Attribute("paper", "ref", {"entity": "paper"}),
            Attribute("phase", "ref", {"entity": "phase"}),
            Attribute("verdict", "enum", {"choices": ["include", "exclude"]}),
            Attribute(
                "criterion", "ref", {"entity": "criterion", "required_when": "exclude"}
            ),
        ],
        operations=("add", "modify", "list", "view"),
    )


def _category_constraints(desc: dict) -> dict:
    out: dict = {"mandatory": desc["mandatory"], "multiplicity": desc["multiplicity"]}
    if desc["category_kind"] == "simple":
        for key in ("max_length", "pattern", "range"):
            if desc.get(key) is not None:
                out[key] = desc[key]
    elif desc["category_kind"] == "list":
        out["choices"] = list(desc["choices"])
    return out


def _category_type(desc: dict) -> str:
    if desc["category_kind"] == "simple":
        return desc["value_type"]
    return "choice"


def classification_config(schema: el.ProjectSchema) -> EntityConfig:
    # Every category ever installed appears; deactivated ones stay readable
    # but drop out of the add/modify projections.
    attrs = [Attribute("paper", "ref", {"entity": "paper"})]
    for e in schema.elements:
        if e.kind != "category":
            continue
        attrs.append(
            Attribute(
                name=e.descriptor["name"],
                semantic_type=_category_type(e.descriptor),
                constraints=_category_constraints(e.descriptor),
                writable=e.status == el.ACTIVE,
                element=e.id,
            )
        )
    return EntityConfig(
        entity="classification",
        attributes=attrs,
        operations=("add", "modify", "list", "view"),
    )


def category_config(e: el.SchemaElement) -> EntityConfig:
    desc = e.descriptor
    ops = ["list", "view"]
    if desc["category_kind"] == "dynamiclist":
        ops.insert(0, "add")  # reviewers may add options while extracting
    return EntityConfig(
        entity=e.natural_id,
        attributes=[
            Attribute(
                "value",
                _category_type(desc),
                _category_constraints(desc),
                element=e.id,
            )
        ],
        operations=tuple(ops),
    )


def derive_entity_configs(schema: el.ProjectSchema) -> list[EntityConfig]:
    configs = [
        paper_config(),
        user_config(),
        member_config(),
        decision_config(),
        classification_config(schema),
    ]
    configs.extend(category_config(e) for e in schema.active("category"))
    return configs
