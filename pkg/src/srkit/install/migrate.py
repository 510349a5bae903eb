"""Migration planning and application.

``compile_model`` produces the fresh-install plan for a validated model;
``diff`` compares a model against an installed schema and yields the
data-preserving plan that reconciles them:

* declared element missing from the schema: add it;
* active element no longer declared: drop it if it holds no data,
  otherwise deactivate it (data is retained and stays readable);
* re-declared deactivated element with an identical descriptor:
  reactivate it (reverting the earlier removal);
* re-declared element with a different descriptor: treated as removal of
  the old element plus addition of a new one under a version-suffixed id.

Choice elements follow their category: they deactivate alongside a
deactivated category instead of being dropped, so reverting the category
also reverts its choices. User-added choices of a dynamic list survive
re-installs and category edits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..dsl.model import ValidatedModel
from . import elements as el
from .configs import derive_entity_configs
from .forms import derive_form

ADD = "add"
DROP = "drop"
DEACTIVATE = "deactivate"
REACTIVATE = "reactivate"

REASON_ADD = "declared→add"
REASON_DROP = "empty→drop"
REASON_DEACTIVATE = "has-data→deactivate"
REASON_REACTIVATE = "identical→reactivate"

_REASONS = {
    ADD: REASON_ADD,
    DROP: REASON_DROP,
    DEACTIVATE: REASON_DEACTIVATE,
    REACTIVATE: REASON_REACTIVATE,
}


class InstallError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


E_STALE_SCHEMA = "E_STALE_SCHEMA"
E_VERSION_CONFLICT = "E_VERSION_CONFLICT"
E_ILLEGAL_DROP = "E_ILLEGAL_DROP"


@dataclass
class MigrationOp:
    op: str  # add | drop | deactivate | reactivate
    element_id: str
    kind: str
    descriptor: dict | None = None  # present for add

    @property
    def reason(self) -> str:
        return _REASONS[self.op]

    def to_dict(self) -> dict:
        d = {"op": self.op, "id": self.element_id, "kind": self.kind, "reason": self.reason}
        if self.descriptor is not None:
            d["descriptor"] = self.descriptor
        return d


@dataclass
class MigrationPlan:
    base_version: int
    ops: list[MigrationOp] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.ops

    def to_report(self) -> dict:
        """Human-readable dry-run report shown in the UI diff preview."""
        return {
            "base_version": self.base_version,
            "target_version": self.base_version + 1,
            "ops": [
                {"op": op.op, "id": op.element_id, "reason": op.reason} for op in self.ops
            ],
        }

    def to_dict(self) -> dict:
        return {"base_version": self.base_version, "ops": [op.to_dict() for op in self.ops]}


def compile_model(vm: ValidatedModel, project_id: str = "") -> MigrationPlan:
    """Fresh-install plan: one add per declared element, base version 0."""
    return diff(el.empty_schema(project_id), vm, counts={})


def diff(
    schema: el.ProjectSchema,
    vm: ValidatedModel,
    counts: dict[str, int],
    current_version: int | None = None,
) -> MigrationPlan:
    if current_version is not None and schema.version != current_version:
        raise InstallError(
            E_STALE_SCHEMA,
            f"schema snapshot at version {schema.version}, store is at {current_version}",
        )
    next_version = schema.version + 1
    by_id = schema.by_id()
    active_by_natural: dict[str, el.SchemaElement] = {}
    deactivated_by_natural: dict[str, list[el.SchemaElement]] = {}
    for e in schema.elements:
        if e.status == el.ACTIVE:
            active_by_natural[e.natural_id] = e
        else:
            deactivated_by_natural.setdefault(e.natural_id, []).append(e)
    for group in deactivated_by_natural.values():
        group.sort(key=lambda e: e.introduced_in, reverse=True)

    removals: list[MigrationOp] = []
    additions: list[MigrationOp] = []
    matched_ids: set[str] = set()
    # natural category id -> element id a declared category resolves to
    category_target: dict[str, str] = {}
    # natural category ids whose element is being replaced this round
    category_replaced: dict[str, str] = {}

    def fresh_id(natural: str) -> str:
        if natural not in by_id:
            return natural
        return f"{natural}@v{next_version}"

    def remove_op(element: el.SchemaElement) -> MigrationOp:
        if counts.get(element.id, 0) > 0:
            return MigrationOp(DEACTIVATE, element.id, element.kind)
        return MigrationOp(DROP, element.id, element.kind)

    declared = el.declared_elements(vm)

    # Pass 1: everything except choices.
    for d in declared:
        if d.kind == "choice":
            continue
        active = active_by_natural.get(d.natural)
        if active is not None and active.kind == d.kind:
            matched_ids.add(active.id)
            if active.descriptor == d.descriptor:
                if d.kind == "category":
                    category_target[d.natural] = active.id
                continue
            # Edit: remove the old element, bring in the declaration anew.
            removals.append(remove_op(active))
            if d.kind == "category":
                category_replaced[d.natural] = active.id
        reused = None
        for cand in deactivated_by_natural.get(d.natural, []):
            if cand.kind == d.kind and cand.descriptor == d.descriptor and cand.id not in matched_ids:
                reused = cand
                break
        if reused is not None:
            matched_ids.add(reused.id)
            additions.append(MigrationOp(REACTIVATE, reused.id, reused.kind))
            if d.kind == "category":
                category_target[d.natural] = reused.id
        else:
            new_id = fresh_id(d.natural)
            additions.append(MigrationOp(ADD, new_id, d.kind, descriptor=d.descriptor))
            if d.kind == "category":
                category_target[d.natural] = new_id

    # Pass 2: declared choices, now that category element ids are settled.
    for d in declared:
        if d.kind != "choice":
            continue
        cat_element_id = category_target[d.category_natural]
        cid = el.choice_id(cat_element_id, d.choice_value)
        descriptor = el.choice_descriptor(cat_element_id, d.choice_value, d.choice_origin)
        existing = by_id.get(cid)
        if existing is not None and existing.status == el.ACTIVE:
            matched_ids.add(cid)
            if existing.descriptor == descriptor:
                continue
            removals.append(remove_op(existing))
            additions.append(
                MigrationOp(ADD, f"{cid}@v{next_version}", "choice", descriptor=descriptor)
            )
            matched_ids.add(f"{cid}@v{next_version}")
        elif existing is not None:
            matched_ids.add(cid)
            if existing.descriptor == descriptor:
                additions.append(MigrationOp(REACTIVATE, cid, "choice"))
            else:
                additions.append(
                    MigrationOp(ADD, f"{cid}@v{next_version}", "choice", descriptor=descriptor)
                )
                matched_ids.add(f"{cid}@v{next_version}")
        else:
            additions.append(MigrationOp(ADD, cid, "choice", descriptor=descriptor))

    # User-added dynamic-list choices are kept; if their category element is
    # being replaced, re-create them under the new element.
    removed_cat_ids = set(category_replaced.values())
    for e in schema.elements:
        if e.kind != "choice" or e.status != el.ACTIVE or e.id in matched_ids:
            continue
        if e.descriptor.get("origin") == "user":
            owner = by_id.get(e.descriptor["category"])
            owner_natural = owner.natural_id if owner is not None else None
            if owner is not None and owner.id in removed_cat_ids:
                new_cat_id = category_target.get(owner_natural)
                new_cat = next(
                    (op for op in additions if op.element_id == new_cat_id), None
                )
                still_dynamic = (
                    new_cat is not None
                    and new_cat.descriptor is not None
                    and new_cat.descriptor.get("category_kind") == "dynamiclist"
                ) or (
                    new_cat is None
                    and new_cat_id is not None
                    and by_id[new_cat_id].descriptor.get("category_kind") == "dynamiclist"
                )
                removals.append(remove_op(e))
                matched_ids.add(e.id)
                if still_dynamic and new_cat_id is not None:
                    additions.append(
                        MigrationOp(
                            ADD,
                            el.choice_id(new_cat_id, e.descriptor["value"]),
                            "choice",
                            descriptor=el.choice_descriptor(
                                new_cat_id, e.descriptor["value"], "user"
                            ),
                        )
                    )
            elif owner is not None and owner.id in category_target.values():
                matched_ids.add(e.id)  # category unchanged: keep the choice

    # Pass 3: active elements that are no longer declared.
    cat_fate: dict[str, str] = {}  # category element id -> drop | deactivate
    for e in schema.elements:
        if e.status != el.ACTIVE or e.id in matched_ids or e.kind == "choice":
            continue
        op = remove_op(e)
        removals.append(op)
        if e.kind == "category":
            cat_fate[e.id] = op.op
    for e in schema.elements:
        if e.status != el.ACTIVE or e.id in matched_ids or e.kind != "choice":
            continue
        owner_id = e.descriptor.get("category")
        fate = cat_fate.get(owner_id)
        if fate is None and owner_id in {op.element_id for op in removals}:
            fate = next(op.op for op in removals if op.element_id == owner_id)
        if fate == DEACTIVATE:
            removals.append(MigrationOp(DEACTIVATE, e.id, "choice"))
        elif fate == DROP:
            removals.append(MigrationOp(DROP, e.id, "choice"))
        else:
            # Owner stays active: a declared choice was removed from the
            # source. Choices hold no records of their own, so drop unless
            # stored values still reference the choice.
            removals.append(remove_op(e))

    return MigrationPlan(base_version=schema.version, ops=removals + additions)


def apply_plan(store, project_id: str, plan: MigrationPlan, policies: dict) -> el.ProjectSchema:
    """Apply a migration plan atomically and persist the regenerated
    entity configs and form descriptor alongside the new schema."""
    with store.transaction(project_id):
        schema = store.get_schema(project_id)
        if schema.version != plan.base_version:
            raise InstallError(
                E_VERSION_CONFLICT,
                f"plan built against version {plan.base_version}, "
                f"store is at {schema.version}",
            )
        new_version = schema.version + 1
        by_id = schema.by_id()
        counts = store.data_counts(project_id)
        for op in plan.ops:
            if op.op == ADD:
                if op.element_id in by_id:
                    raise InstallError(
                        E_VERSION_CONFLICT, f"element {op.element_id} already exists"
                    )
                element = el.SchemaElement(
                    id=op.element_id,
                    kind=op.kind,
                    descriptor=op.descriptor,
                    introduced_in=new_version,
                )
                schema.elements.append(element)
                by_id[op.element_id] = element
            elif op.op == DROP:
                target = by_id.get(op.element_id)
                if target is None:
                    raise InstallError(E_VERSION_CONFLICT, f"unknown element {op.element_id}")
                if counts.get(op.element_id, 0) > 0:
                    raise InstallError(
                        E_ILLEGAL_DROP,
                        f"element {op.element_id} holds data and cannot be dropped",
                    )
                schema.elements.remove(target)
                del by_id[op.element_id]
            elif op.op == DEACTIVATE:
                target = by_id.get(op.element_id)
                if target is None or target.status != el.ACTIVE:
                    raise InstallError(
                        E_VERSION_CONFLICT, f"cannot deactivate {op.element_id}"
                    )
                target.status = el.DEACTIVATED
                target.deactivated_in = new_version
            elif op.op == REACTIVATE:
                target = by_id.get(op.element_id)
                if target is None or target.status != el.DEACTIVATED:
                    raise InstallError(
                        E_VERSION_CONFLICT, f"cannot reactivate {op.element_id}"
                    )
                target.status = el.ACTIVE
                target.deactivated_in = None
            else:
                raise InstallError(E_VERSION_CONFLICT, f"unknown op {op.op!r}")
        schema.version = new_version
        schema.policies = policies
        configs = [c.to_dict() for c in derive_entity_configs(schema)]
        form = derive_form(schema).to_dict()
        store.install_schema(project_id, schema.to_dict(), configs, form)
        return schema
