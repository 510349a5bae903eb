"""Semantic validation of parsed configuration models.

All violations are reported in a single pass (no fail-fast) so an editor
can show every problem at once.
"""

from __future__ import annotations

from collections import defaultdict

from . import diagnostics as diag
from .diagnostics import Diagnostic, DslError
from .model import (
    MAX_NESTING_DEPTH,
    CategoryDecl,
    ConfigModel,
    DynamicListKind,
    ListKind,
    SimpleKind,
    ValidatedModel,
    slugify,
)


def _dup_check(items, key, what, errors):
    """Report every location involved in a duplicate key."""
    seen = defaultdict(list)
    for item in items:
        seen[key(item)].append(item)
    for k, group in seen.items():
        if len(group) > 1:
            for item in group:
                errors.append(
                    diag.error(diag.E_DUP_NAME, f"duplicate {what} {k!r}", item.loc)
                )


def _check_roles(model: ConfigModel, errors: list[Diagnostic]):
    roles = model.project.roles
    _dup_check(roles, lambda r: r.name, "role", errors)
    admins = [r for r in roles if r.rank == "admin"]
    if len(admins) != 1:
        errors.append(
            diag.error(
                diag.E_NO_ADMIN,
                f"exactly one role with rank 'admin' is required, found {len(admins)}",
                model.project.loc,
            )
        )


def _role_rank(model: ConfigModel, name: str) -> str | None:
    for r in model.project.roles:
        if r.name == name:
            return r.rank
    return None


def _check_role_ref(model, name, loc, what, errors):
    rank = _role_rank(model, name)
    if rank is None:
        errors.append(diag.error(diag.E_UNKNOWN_ROLE, f"{what} {name!r} is not a declared role", loc))
    elif rank not in ("senior", "admin"):
        errors.append(
            diag.error(
                diag.E_UNKNOWN_ROLE,
                f"{what} {name!r} must have rank 'senior' or 'admin'",
                loc,
            )
        )


def _check_screening(model: ConfigModel, errors: list[Diagnostic]):
    s = model.screening
    if not s.phases:
        errors.append(diag.error(diag.E_DUP_NAME, "at least one screening phase is required", s.loc))
    _dup_check(s.phases, lambda p: p.name, "phase", errors)
    if s.assignment.reviewers_per_paper < 1:
        errors.append(
            diag.error(
                diag.E_BAD_RANGE,
                f"reviewers per paper must be >= 1, got {s.assignment.reviewers_per_paper}",
                s.assignment.loc,
            )
        )
    if s.conflict.arbiter_role is not None:
        _check_role_ref(model, s.conflict.arbiter_role, s.conflict.loc, "arbiter role", errors)
    elif s.conflict.strategy in ("unanimity", "arbiter"):
        errors.append(
            diag.error(
                diag.E_UNKNOWN_ROLE,
                f"conflict strategy {s.conflict.strategy!r} requires an arbiter role",
                s.conflict.loc,
            )
        )
    if s.validation is not None:
        v = s.validation
        if not (0 < v.percentage <= 100):
            errors.append(
                diag.error(
                    diag.E_BAD_PERCENT,
                    f"validation percentage must be in (0, 100], got {v.percentage}",
                    v.loc,
                )
            )
        _check_role_ref(model, v.validator_role, v.loc, "validator role", errors)
    if not s.exclusion_criteria:
        errors.append(
            diag.error(diag.E_DUP_NAME, "at least one exclusion criterion is required", s.loc)
        )
    _dup_check(s.exclusion_criteria, lambda c: c.text, "exclusion criterion", errors)
    # Distinct criterion texts must also map to distinct storage keys.
    by_slug = defaultdict(list)
    for c in s.exclusion_criteria:
        by_slug[slugify(c.text)].append(c)
    for slug, group in by_slug.items():
        texts = {c.text for c in group}
        if len(texts) > 1:
            for c in group:
                errors.append(
                    diag.error(
                        diag.E_DUP_NAME,
                        f"criteria {sorted(texts)} collide on storage key {slug!r}",
                        c.loc,
                    )
                )


def _check_category(cat: CategoryDecl, errors: list[Diagnostic]):
    kind = cat.kind
    if isinstance(kind, SimpleKind):
        if kind.max_length is not None:
            if kind.value_type != "text":
                errors.append(
                    diag.error(
                        diag.E_BAD_RANGE,
                        f"max_length only applies to text, not {kind.value_type!r}",
                        cat.loc,
                    )
                )
            elif kind.max_length < 1:
                errors.append(
                    diag.error(diag.E_BAD_RANGE, "max_length must be >= 1", cat.loc)
                )
        if kind.pattern is not None and kind.value_type != "text":
            errors.append(
                diag.error(
                    diag.E_BAD_RANGE,
                    f"pattern only applies to text, not {kind.value_type!r}",
                    cat.loc,
                )
            )
        if kind.range is not None:
            lo, hi = kind.range
            if kind.value_type not in ("int", "real"):
                errors.append(
                    diag.error(
                        diag.E_BAD_RANGE,
                        f"range only applies to int or real, not {kind.value_type!r}",
                        cat.loc,
                    )
                )
            elif lo > hi:
                errors.append(
                    diag.error(diag.E_BAD_RANGE, f"range minimum {lo} exceeds maximum {hi}", cat.loc)
                )
    elif isinstance(kind, ListKind):
        if len(kind.choices) < 2:
            errors.append(
                diag.error(
                    diag.E_EMPTY_CHOICES,
                    f"list category {cat.name!r} needs at least 2 choices, got {len(kind.choices)}",
                    cat.loc,
                )
            )
    if cat.multiplicity < 0:
        errors.append(
            diag.error(diag.E_BAD_RANGE, "multiplicity must be >= 0 (0 = unbounded)", cat.loc)
        )
    # Choice values must map to distinct storage keys within the category.
    by_slug = defaultdict(list)
    for value in cat.choice_values():
        by_slug[slugify(value)].append(value)
    for slug, values in by_slug.items():
        if len(values) > 1:
            errors.append(
                diag.error(
                    diag.E_DUP_NAME,
                    f"choices {values} of category {cat.name!r} collide on key {slug!r}",
                    cat.loc,
                )
            )


def _in_subtree(root: CategoryDecl, name: str) -> bool:
    if root.name == name:
        return True
    return any(_in_subtree(sub, name) for sub in root.subcategories)


def _check_dependencies(model: ConfigModel, errors: list[Diagnostic]):
    cats = {cat.name: cat for cat, _, _ in model.iter_categories()}
    edges: dict[str, str] = {}  # dependent -> parent
    for cat, _, _ in model.iter_categories():
        dep = cat.depends_on
        if dep is None:
            continue
        parent = cats.get(dep.parent)
        if parent is None:
            errors.append(
                diag.error(
                    diag.E_DEP_UNRESOLVED,
                    f"dependency parent {dep.parent!r} is not a declared category",
                    dep.loc,
                )
            )
            continue
        if not isinstance(parent.kind, (ListKind, DynamicListKind)):
            errors.append(
                diag.error(
                    diag.E_DEP_UNRESOLVED,
                    f"dependency parent {dep.parent!r} must be a list or dynamiclist category",
                    dep.loc,
                )
            )
            continue
        if not isinstance(cat.kind, (ListKind, DynamicListKind)):
            errors.append(
                diag.error(
                    diag.E_DEP_UNRESOLVED,
                    f"category {cat.name!r} has a dependency but no choices to restrict",
                    dep.loc,
                )
            )
            continue
        if cat.name != dep.parent and _in_subtree(cat, dep.parent):
            errors.append(
                diag.error(
                    diag.E_DEP_CYCLE,
                    f"category {cat.name!r} cannot depend on its own subcategory {dep.parent!r}",
                    dep.loc,
                )
            )
            continue
        parent_choices = set(parent.choice_values())
        own_choices = set(cat.choice_values())
        for key, allowed in dep.mapping.items():
            if key not in parent_choices:
                errors.append(
                    diag.error(
                        diag.E_DEP_UNRESOLVED,
                        f"{key!r} is not a choice of parent category {dep.parent!r}",
                        dep.loc,
                    )
                )
            for value in allowed:
                if value not in own_choices:
                    errors.append(
                        diag.error(
                            diag.E_DEP_UNRESOLVED,
                            f"{value!r} is not a choice of category {cat.name!r}",
                            dep.loc,
                        )
                    )
        edges[cat.name] = dep.parent

    # Cycle detection over the dependency graph.
    state: dict[str, int] = {}  # 0 visiting, 1 done

    def visit(name: str, trail: list[str]):
        if state.get(name) == 1:
            return
        if state.get(name) == 0:
            cycle = trail[trail.index(name):] + [name]
            errors.append(
                diag.error(
                    diag.E_DEP_CYCLE,
                    "dependency cycle: " + " -> ".join(cycle),
                    cats[name].loc if name in cats else None,
                )
            )
            return
        state[name] = 0
        nxt = edges.get(name)
        if nxt is not None and nxt in cats:
            visit(nxt, trail + [name])
        state[name] = 1

    for name in edges:
        if state.get(name) != 1:
            visit(name, [])

    _check_sibling_order(model, edges, errors)


def _check_sibling_order(model: ConfigModel, edges: dict[str, str], errors):
    """A dependency parent must be renderable before its dependent in a form.

    Subcategory blocks render contiguously, so each group of siblings must
    admit an order where no subtree depends on a later sibling's subtree.
    """
    if any(d.code == diag.E_DEP_CYCLE for d in errors):
        return

    def names_in(cat: CategoryDecl) -> set[str]:
        out = {cat.name}
        for sub in cat.subcategories:
            out |= names_in(sub)
        return out

    def deps_of(cat: CategoryDecl) -> set[str]:
        out = set()
        if cat.name in edges:
            out.add(edges[cat.name])
        for sub in cat.subcategories:
            out |= deps_of(sub)
        return out

    def check_level(siblings: list[CategoryDecl]):
        groups = [(names_in(c), deps_of(c), c) for c in siblings]
        remaining = list(range(len(groups)))
        placed: set[str] = set()
        all_here = set()
        for names, _, _ in groups:
            all_here |= names
        while remaining:
            progressed = False
            for i in list(remaining):
                names, deps, _ = groups[i]
                if (deps & all_here) - names <= placed:
                    placed |= names
                    remaining.remove(i)
                    progressed = True
            if not progressed:
                stuck = [groups[i][2] for i in remaining]
                for cat in stuck:
                    errors.append(
                        diag.error(
                            diag.E_DEP_CYCLE,
                            f"dependencies of {cat.name!r} cannot be ordered among its siblings",
                            cat.loc,
                        )
                    )
                break
        for cat in siblings:
            check_level(cat.subcategories)

    check_level(model.scheme.categories)


def _check_scheme(model: ConfigModel, errors: list[Diagnostic]):
    flat = [(cat, depth) for cat, _, depth in model.iter_categories()]
    _dup_check([c for c, _ in flat], lambda c: c.name, "category", errors)
    for cat, depth in flat:
        if depth > MAX_NESTING_DEPTH:
            errors.append(
                diag.error(
                    diag.E_DEPTH,
                    f"category {cat.name!r} nested at depth {depth}, maximum is {MAX_NESTING_DEPTH}",
                    cat.loc,
                )
            )
        _check_category(cat, errors)
    _check_dependencies(model, errors)


def validate(model: ConfigModel) -> ValidatedModel:
    """Check every model invariant; raise DslError listing all violations."""
    errors: list[Diagnostic] = []
    if not model.project.roles:
        errors.append(diag.error(diag.E_NO_ADMIN, "at least one role is required", model.project.loc))
    _check_roles(model, errors)
    _check_screening(model, errors)
    _check_scheme(model, errors)
    if errors:
        raise DslError(errors)
    return ValidatedModel(model)
