"""Context-based dispatch: one generic controller per operation kind,
parameterized by the project's EntityConfig documents.

A request names (project, entity, operation). The entity's config
decides whether the operation exists, which attributes are read or
written, and which rank may call it; the handler body is shared across
entities. Workflow entities (decisions, classifications, dynamic
choices) route to the engine so their domain rules stay in one place.
"""

from __future__ import annotations

from ..engine import CLASSIFICATION, DECISION, ReviewEngine
from ..store import PAPER_ELEMENT, ProjectStore
from .errors import E_UNKNOWN_ENTITY, E_UNKNOWN_OP, ApiError

RANK_ORDER = {"reviewer": 0, "senior": 1, "admin": 2}

# Minimum rank per (entity family, operation). Reads are open to every
# member; corpus and membership edits are administrative.
_WRITE_RANKS = {
    ("paper", "add"): "admin",
    ("paper", "modify"): "admin",
    ("paper", "remove"): "admin",
    ("member", "add"): "admin",
    ("member", "modify"): "admin",
    ("member", "remove"): "admin",
    ("user", "add"): "admin",
    ("user", "modify"): "reviewer",  # self-service credential change
    ("screening_decision", "add"): "reviewer",
    ("screening_decision", "modify"): "reviewer",
    ("classification", "add"): "reviewer",
    ("classification", "modify"): "reviewer",
    ("category", "add"): "reviewer",
}


def rank_at_least(rank: str, minimum: str) -> bool:
    return RANK_ORDER.get(rank, -1) >= RANK_ORDER[minimum]


def config_for(store: ProjectStore, project: str, entity: str) -> dict:
    for cfg in store.get_configs(project):
        if cfg["entity"] == entity:
            return cfg
    raise ApiError(E_UNKNOWN_ENTITY, f"no entity {entity!r} in {project!r}")


def _check_op(cfg: dict, op: str):
    if op not in cfg["operations"]:
        raise ApiError(E_UNKNOWN_OP, f"entity {cfg['entity']!r} has no operation {op!r}")


def _family(entity: str) -> str:
    return "category" if entity.startswith("category.") else entity


def required_rank(entity: str, op: str) -> str | None:
    if op in ("list", "view"):
        return "reviewer"
    return _WRITE_RANKS.get((_family(entity), op))


def _attr_names(cfg: dict, op: str) -> list[str]:
    if op in ("add", "modify"):
        return [a["name"] for a in cfg["attributes"] if a["writable"]]
    return [a["name"] for a in cfg["attributes"]]


def _shape(cfg: dict, source: dict, record: dict | None = None) -> dict:
    row = {name: source.get(name) for name in _attr_names(cfg, "list")}
    if record is not None:
        row["id"] = record["id"]
        row["record_version"] = record["record_version"]
    return row


def _sources(store: ProjectStore, project: str, cfg: dict) -> list[tuple[dict, dict | None]]:
    """(attribute document, backing record or None) per row."""
    entity = cfg["entity"]
    if entity == "user":
        return [({"username": u["login"]}, None) for u in store.list_users()]
    if entity == "member":
        return [(dict(m), None) for m in store.list_members(project)]
    if entity == "paper":
        rows, _ = store.list_records(project, PAPER_ELEMENT)
        return [(dict(r["payload"]), r) for r in rows]
    if entity == "screening_decision":
        rows, _ = store.list_records(project, DECISION)
        out = []
        for r in rows:
            p = r["payload"]
            out.append(
                (
                    {
                        "paper": r["paper_id"],
                        "phase": p["phase"],
                        "verdict": p["verdict"],
                        "criterion": p["criterion"],
                    },
                    r,
                )
            )
        return out
    if entity == "classification":
        rows, _ = store.list_records(project, CLASSIFICATION)
        out = []
        for r in rows:
            values = r["payload"]["values"]
            doc = {"paper": r["paper_id"]}
            for a in cfg["attributes"]:
                if a.get("element"):
                    doc[a["name"]] = values.get(a["element"])
            out.append((doc, r))
        return out
    if entity.startswith("category."):
        schema = store.get_schema(project)
        element = cfg["attributes"][0]["element"]
        return [
            ({"value": e.descriptor["value"]}, None)
            for e in schema.active("choice")
            if e.descriptor["category"] == element
        ]
    raise ApiError(E_UNKNOWN_ENTITY, f"no row source for {entity!r}")


def generic_list(store: ProjectStore, project: str, entity: str, page: int | None, page_size: int = 20) -> dict:
    cfg = config_for(store, project, entity)
    _check_op(cfg, "list")
    rows = [_shape(cfg, doc, rec) for doc, rec in _sources(store, project, cfg)]
    total = len(rows)
    if page is not None:
        start = (page - 1) * page_size
        rows = rows[start : start + page_size]
    return {
        "entity": entity,
        "rows": rows,
        "total": total,
        "page": page,
        "page_size": page_size if page is not None else None,
        "page_template": cfg["page_bindings"]["list"],
    }


def generic_view(store: ProjectStore, project: str, entity: str, key) -> dict:
    cfg = config_for(store, project, entity)
    _check_op(cfg, "view")
    key_attr = cfg["attributes"][0]["name"]
    for doc, rec in _sources(store, project, cfg):
        if rec is not None and rec["id"] == key:
            return _shape(cfg, doc, rec)
        if rec is None and str(doc.get(key_attr)) == str(key):
            return _shape(cfg, doc, rec)
    raise ApiError("E_NOT_FOUND", f"no {entity} {key!r}")


def generic_write(
    store: ProjectStore,
    engine: ReviewEngine,
    project: str,
    entity: str,
    op: str,
    body: dict,
    actor: str,
) -> dict:
    cfg = config_for(store, project, entity)
    _check_op(cfg, op)
    family = _family(entity)
    if family == "paper":
        if op == "add":
            payload = {name: body.get(name) for name in _attr_names(cfg, "add")}
            return store.add_record(project, PAPER_ELEMENT, payload, actor)
        if op == "modify":
            payload = {name: body.get(name) for name in _attr_names(cfg, "modify")}
            return store.modify_record(
                project, body["id"], payload, body["expected_version"]
            )
        if op == "remove":
            store.remove_record(project, body["id"])
            return {"removed": body["id"]}
    if family == "user":
        if op == "add":
            login = store.create_user(
                body["username"], body["credential"], body.get("display_name")
            )
            return {"username": login}
        if op == "modify":
            if body.get("username") != actor:
                raise ApiError("E_FORBIDDEN", "credentials can only be changed by their owner")
            store.set_password(actor, body["credential"])
            return {"username": actor}
    if family == "member":
        if op == "add":
            store.add_member(project, body["user"], body["role"])
        elif op == "modify":
            store.update_member(project, body["user"], body["role"])
        else:
            store.remove_member(project, body["user"])
        return {"user": body["user"], "role": body.get("role")}
    if family == "screening_decision":
        return engine.submit_decision(
            project,
            int(body["assignment"]),
            actor,
            body["verdict"],
            criterion=body.get("criterion"),
            note=body.get("note"),
        )
    if family == "classification":
        return engine.submit_classification(
            project,
            int(body["paper"]),
            actor,
            body.get("values") or {},
            mark_complete=bool(body.get("mark_complete")),
            expected_version=body.get("expected_version"),
        )
    if family == "category":
        choices = engine.add_dynamic_choice(project, entity, body.get("value"), actor)
        return {"entity": entity, "choices": choices}
    raise ApiError(E_UNKNOWN_OP, f"no handler for {entity!r}.{op}")
