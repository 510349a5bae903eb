"""Data-extraction form generation.

``derive_form`` turns the active categories of an installed schema into a
render tree. Field order is the schema's introduction order, adjusted so
that every drill-down parent renders before its dependents; subcategory
blocks stay contiguous, so the adjustment moves whole sibling subtrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import elements as el

WIDGETS = {
    "text": "text_input",
    "int": "number_input",
    "real": "number_input",
    "bool": "checkbox",
    "date": "date_input",
    "list": "single_select",
    "dynamiclist": "dynamic_select",
}


@dataclass
class FormField:
    element: str  # schema element id of the category
    name: str
    title: str
    widget: str
    mandatory: bool
    multiplicity: int  # 0 = unlimited
    constraints: dict = field(default_factory=dict)
    options: list[dict] | None = None  # [{"id": choice element id, "value": ...}]
    allows_additions: bool = False
    depends_on: dict | None = None  # {"parent": field element id, "mapping": {...}}
    children: list["FormField"] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "element": self.element,
            "name": self.name,
            "title": self.title,
            "widget": self.widget,
            "mandatory": self.mandatory,
            "multiplicity": self.multiplicity,
            "constraints": self.constraints,
            "options": self.options,
            "allows_additions": self.allows_additions,
            "depends_on": self.depends_on,
            "children": [c.to_dict() for c in self.children],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FormField":
        return cls(
            element=d["element"],
            name=d["name"],
            title=d["title"],
            widget=d["widget"],
            mandatory=d["mandatory"],
            multiplicity=d["multiplicity"],
            constraints=d.get("constraints", {}),
            options=d.get("options"),
            allows_additions=d.get("allows_additions", False),
            depends_on=d.get("depends_on"),
            children=[cls.from_dict(c) for c in d.get("children", [])],
        )


@dataclass
class FormDescriptor:
    version: int
    fields: list[FormField] = field(default_factory=list)

    def walk(self):
        """Yield every field in pre-order."""

        def rec(fields):
            for f in fields:
                yield f
                yield from rec(f.children)

        yield from rec(self.fields)

    def by_element(self) -> dict[str, FormField]:
        return {f.element: f for f in self.walk()}

    def to_dict(self) -> dict:
        return {"version": self.version, "fields": [f.to_dict() for f in self.fields]}

    @classmethod
    def from_dict(cls, d: dict) -> "FormDescriptor":
        return cls(
            version=d["version"],
            fields=[FormField.from_dict(f) for f in d.get("fields", [])],
        )


def _constraints(desc: dict) -> dict:
    out: dict = {}
    if desc["category_kind"] == "simple":
        out["value_type"] = desc["value_type"]
        for key in ("max_length", "pattern", "range"):
            if desc.get(key) is not None:
                out[key] = desc[key]
    return out


def derive_form(schema: el.ProjectSchema) -> FormDescriptor:
    cats = schema.active("category")
    by_name = {e.descriptor["name"]: e for e in cats}
    choices_of: dict[str, list[el.SchemaElement]] = {e.id: [] for e in cats}
    for ch in schema.active("choice"):
        owner = ch.descriptor["category"]
        if owner in choices_of:
            choices_of[owner].append(ch)

    children_names: dict[str | None, list[str]] = {None: []}
    for e in cats:
        children_names.setdefault(e.descriptor["name"], [])
    for e in cats:
        parent = e.descriptor["parent"]
        if parent not in by_name:
            parent = None  # orphaned subtree renders at top level
        children_names.setdefault(parent, []).append(e.descriptor["name"])

    # Dependency edges by category name, restricted to active parents.
    dep_parent = {
        e.descriptor["name"]: e.descriptor["depends_on"]["parent"]
        for e in cats
        if e.descriptor["depends_on"] is not None
        and e.descriptor["depends_on"]["parent"] in by_name
    }

    def subtree_names(name: str) -> set[str]:
        out = {name}
        for sub in children_names.get(name, []):
            out |= subtree_names(sub)
        return out

    def subtree_deps(name: str) -> set[str]:
        out = set()
        if name in dep_parent:
            out.add(dep_parent[name])
        for sub in children_names.get(name, []):
            out |= subtree_deps(sub)
        return out

    def order_siblings(names: list[str]) -> list[str]:
        groups = [(n, subtree_names(n), subtree_deps(n)) for n in names]
        all_here: set[str] = set()
        for _, inside, _ in groups:
            all_here |= inside
        placed: set[str] = set()
        out: list[str] = []
        pending = list(groups)
        while pending:
            for i, (n, inside, deps) in enumerate(pending):
                if (deps & all_here) - inside <= placed:
                    out.append(n)
                    placed |= inside
                    del pending[i]
                    break
            else:
                # Unsatisfiable ordering can only come from a hand-edited
                # schema; fall back to introduction order rather than loop.
                out.extend(n for n, _, _ in pending)
                break
        return out

    def build(name: str) -> FormField:
        e = by_name[name]
        desc = e.descriptor
        kind = desc["category_kind"]
        widget = WIDGETS[desc["value_type"]] if kind == "simple" else WIDGETS[kind]
        options = None
        if kind in ("list", "dynamiclist"):
            options = [
                {"id": ch.id, "value": ch.descriptor["value"]}
                for ch in choices_of[e.id]
            ]
        wiring = None
        if name in dep_parent:
            wiring = {
                "parent": by_name[dep_parent[name]].id,
                "mapping": {
                    k: list(v) for k, v in desc["depends_on"]["mapping"].items()
                },
            }
        return FormField(
            element=e.id,
            name=name,
            title=desc["title"],
            widget=widget,
            mandatory=desc["mandatory"],
            multiplicity=desc["multiplicity"],
            constraints=_constraints(desc),
            options=options,
            allows_additions=kind == "dynamiclist",
            depends_on=wiring,
            children=[build(sub) for sub in order_siblings(children_names[name])],
        )

    roots = order_siblings(children_names[None])
    return FormDescriptor(version=schema.version, fields=[build(n) for n in roots])
