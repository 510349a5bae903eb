"""Canonical printing of configuration models.

The output reparses to a model equal to the input (ignoring source
locations), with one declaration per line and two-space indentation.
"""

from __future__ import annotations

from .model import (
    CategoryDecl,
    ConfigModel,
    DynamicListKind,
    ListKind,
    SimpleKind,
    SourceText,
)


def _quote(text: str) -> str:
    out = text.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def _num(value) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def _type_of(kind) -> str:
    if isinstance(kind, SimpleKind):
        out = kind.value_type
        if kind.max_length is not None:
            out += f"({kind.max_length})"
        if kind.range is not None:
            out += f" range({_num(kind.range[0])}, {_num(kind.range[1])})"
        if kind.pattern is not None:
            out += f" pattern {_quote(kind.pattern)}"
        return out
    choices = kind.choices if isinstance(kind, ListKind) else kind.initial_choices
    return "(" + ", ".join(_quote(c) for c in choices) + ")"


def _category_lines(cat: CategoryDecl, indent: str, lines: list[str]):
    kw = {SimpleKind: "simple", ListKind: "list", DynamicListKind: "dynamiclist"}[type(cat.kind)]
    head = f"{indent}{kw} {cat.name} {_quote(cat.title)}: {_type_of(cat.kind)}"
    if cat.mandatory:
        head += " *"
    if cat.multiplicity != 1:
        head += f" [{cat.multiplicity}]"
    if cat.depends_on is not None:
        entries = ", ".join(
            f"{_quote(key)} -> {{{', '.join(_quote(v) for v in allowed)}}}"
            for key, allowed in cat.depends_on.mapping.items()
        )
        head += f" depends on {cat.depends_on.parent} ({entries})"
    if cat.subcategories:
        lines.append(head + " {")
        for sub in cat.subcategories:
            _category_lines(sub, indent + "  ", lines)
        lines.append(indent + "}")
    else:
        lines.append(head)


def pretty_print(model: ConfigModel, origin: str = "<printed>") -> SourceText:
    lines: list[str] = []
    p = model.project
    lines.append(f"project {p.name} {_quote(p.label)}")
    lines.append("")
    lines.append("roles {")
    for role in p.roles:
        lines.append(f"  {role.name}: {role.rank}")
    lines.append("}")
    lines.append("")

    s = model.screening
    lines.append("screening {")
    lines.append("  phases {")
    for phase in s.phases:
        lines.append(f"    {phase.name}: {phase.evidence}")
    lines.append("  }")
    lines.append(f"  assign {{ mode {s.assignment.mode} reviewers {s.assignment.reviewers_per_paper} }}")
    conflict = f"  conflict {{ strategy {s.conflict.strategy}"
    if s.conflict.arbiter_role is not None:
        conflict += f" arbiter {s.conflict.arbiter_role}"
    lines.append(conflict + " }")
    if s.validation is not None:
        v = s.validation
        lines.append(
            f"  validation {{ percent {_num(v.percentage)} target {v.target} validator {v.validator_role} }}"
        )
    lines.append("  exclusion {")
    for crit in s.exclusion_criteria:
        lines.append(f"    {_quote(crit.text)}")
    lines.append("  }")
    lines.append("}")
    lines.append("")

    lines.append("classification {")
    for cat in model.scheme.categories:
        _category_lines(cat, "  ", lines)
    lines.append("}")
    return SourceText(origin=origin, content="\n".join(lines) + "\n")
