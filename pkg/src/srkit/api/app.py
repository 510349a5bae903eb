"""HTTP boundary: authentication, role-based authorization, and routing
into the store, installer, and review engine.

Handlers are synchronous on purpose: they run in the framework's thread
pool, so slow store transactions never stall the event loop and requests
genuinely race (which the optimistic install path relies on). Installs
accept an optional base_version so a client that previewed a diff can
insist its view is still current; two confirmations racing from the same
preview leave exactly one winner.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from fastapi import Body, Depends, FastAPI, Query, Request, Response
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..dsl import DslError, parse, validate
from ..engine import E_FORMAT, ClassificationError, EngineError, ReviewEngine
from ..install import InstallError, compile_model, diff, policies_doc, apply_plan
from ..store import ProjectStore, StoreError
from .auth import SessionManager
from .config import ServiceConfig
from .dispatch import (
    config_for,
    generic_list,
    generic_view,
    generic_write,
    rank_at_least,
    required_rank,
)
from .errors import (
    E_BAD_CREDENTIALS,
    E_EXPIRED,
    E_NAME_MISMATCH,
    E_UNKNOWN_OP,
    ApiError,
)


async def _raw_body(request: Request) -> bytes:
    # Async dependency so sync handlers can take the body verbatim;
    # the framework would otherwise JSON-parse it first.
    return await request.body()


def _decode(raw: bytes, request: Request, text_key: str) -> dict:
    """Routes fed by the editor or file uploads take either raw text or a
    JSON object carrying the text under a known key."""
    ctype = request.headers.get("content-type", "")
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise ApiError(E_FORMAT, "body must be UTF-8")
    if "json" in ctype:
        try:
            doc = json.loads(text)
        except ValueError:
            raise ApiError(E_FORMAT, "malformed JSON body")
        if not isinstance(doc, dict):
            raise ApiError(E_FORMAT, "JSON body must be an object")
        return doc
    return {text_key: text}


def create_app(store: ProjectStore | None = None, config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    if store is None:
        store = ProjectStore(config.data_dir, credential_cost=config.credential_cost)
    engine = ReviewEngine(store)
    sessions = SessionManager(config.session_ttl_hours)
    if (
        config.bootstrap_admin
        and config.bootstrap_credential
        and not store.has_user(config.bootstrap_admin)
    ):
        store.create_user(config.bootstrap_admin, config.bootstrap_credential)

    app = FastAPI(title="srkit", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.engine = engine
    app.state.sessions = sessions

    install_locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def install_lock(project: str) -> threading.Lock:
        with locks_guard:
            return install_locks.setdefault(project, threading.Lock())

    # -- plumbing ------------------------------------------------------

    def actor_of(request: Request) -> str:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise ApiError(E_EXPIRED, "missing bearer token")
        return sessions.resolve(header.split(" ", 1)[1].strip())

    def require_member(project: str, actor: str) -> str:
        store.get_project(project)  # unknown project stays a 404
        rank = engine.member_rank(project, actor)
        if rank is None:
            raise ApiError("E_FORBIDDEN", f"{actor!r} is not a member of {project!r}")
        return rank

    def require_rank(project: str, actor: str, minimum: str) -> str:
        rank = require_member(project, actor)
        if not rank_at_least(rank, minimum):
            raise ApiError("E_FORBIDDEN", f"operation requires {minimum} rank")
        return rank

    def with_ref(project: str, record: dict) -> dict:
        out = dict(record)
        out["ref"] = f"{project}:{record['id']}"
        return out

    def envelope(code: str, message: str, details: list) -> JSONResponse:
        err = ApiError(code, message, details)
        return JSONResponse(err.envelope(), status_code=err.status)

    @app.exception_handler(ApiError)
    def _h_api(request, exc: ApiError):
        return JSONResponse(exc.envelope(), status_code=exc.status)

    @app.exception_handler(EngineError)
    def _h_engine(request, exc: EngineError):
        details = exc.details if isinstance(exc.details, list) else []
        return envelope(exc.code, str(exc), details)

    @app.exception_handler(StoreError)
    def _h_store(request, exc: StoreError):
        return envelope(exc.code, str(exc), [])

    @app.exception_handler(InstallError)
    def _h_install(request, exc: InstallError):
        return envelope(exc.code, str(exc), [])

    @app.exception_handler(DslError)
    def _h_dsl(request, exc: DslError):
        code = exc.diagnostics[0].code if exc.diagnostics else "E_SYNTAX"
        return envelope(code, str(exc), [d.to_dict() for d in exc.diagnostics])

    @app.exception_handler(RequestValidationError)
    def _h_request(request, exc: RequestValidationError):
        return envelope(E_FORMAT, "invalid request body", jsonable_encoder(exc.errors()))

    # -- auth ----------------------------------------------------------

    @app.post("/auth/login")
    def login(body: dict = Body(...)):
        user = store.verify_credentials(
            str(body.get("login") or ""), str(body.get("credential") or "")
        )
        if user is None:
            raise ApiError(E_BAD_CREDENTIALS, "unknown login or wrong credential")
        session = sessions.open(user["login"])
        return {"token": session.token, "user": user, "expires_at": session.expires_at}

    @app.post("/auth/logout")
    def logout(request: Request):
        actor_of(request)  # only live sessions can be revoked
        sessions.revoke(request.headers["authorization"].split(" ", 1)[1].strip())
        return {"revoked": True}

    @app.get("/me")
    def me(request: Request):
        actor = actor_of(request)
        return {
            "user": store.public_user(actor),
            "projects": store.list_projects_for(actor),
        }

    @app.get("/users")
    def list_users(request: Request):
        actor_of(request)
        return {"users": store.list_users()}

    @app.post("/users", status_code=201)
    def create_user(request: Request, body: dict = Body(...)):
        actor_of(request)
        login_name = str(body.get("login") or "")
        credential = str(body.get("credential") or "")
        if not login_name or not credential:
            raise ApiError("E_CONSTRAINT", "login and credential are required")
        store.create_user(login_name, credential, body.get("display_name"))
        return {"user": store.public_user(login_name)}

    # -- projects and installation -------------------------------------

    @app.get("/projects")
    def list_projects(request: Request):
        actor = actor_of(request)
        return {"projects": store.list_projects_for(actor)}

    @app.post("/projects", status_code=201)
    def create_project(request: Request, body: bytes = Depends(_raw_body)):
        actor = actor_of(request)
        doc = _decode(body, request, "source")
        source = doc.get("source") or ""
        vm = validate(parse(source, "<request>"))
        name = vm.project.name
        store.create_project(name, vm.project.label, actor)
        plan = compile_model(vm, name)
        schema = apply_plan(store, name, plan, policies_doc(vm))
        return {
            "project": store.get_project(name),
            "version": schema.version,
            "report": plan.to_report(),
            "diagnostics": [],
        }

    @app.get("/projects/{p}")
    def project_info(p: str, request: Request):
        actor = actor_of(request)
        rank = require_member(p, actor)
        schema = store.get_schema(p)
        phases = [
            {
                "name": e.descriptor["name"],
                "evidence": e.descriptor["evidence"],
                "open": engine._phase_open(p, e.id),
            }
            for e in schema.active("phase")
        ]
        return {
            "project": store.get_project(p),
            "rank": rank,
            "role": store.member_role(p, actor),
            "phases": phases,
            "policies": schema.policies,
        }

    @app.post("/projects/{p}/install")
    def install(
        p: str,
        request: Request,
        body: bytes = Depends(_raw_body),
        dry_run: bool = Query(False),
    ):
        actor = actor_of(request)
        doc = _decode(body, request, "source")
        vm = validate(parse(doc.get("source") or "", "<install>"))
        if vm.project.name != p:
            raise ApiError(
                E_NAME_MISMATCH,
                f"source declares project {vm.project.name!r}, route names {p!r}",
            )
        require_rank(p, actor, "admin")
        schema = store.get_schema(p)
        base = doc.get("base_version")
        if base is not None and base != schema.version:
            raise ApiError(
                "E_VERSION_CONFLICT",
                f"preview was against version {base}, project is at {schema.version}",
            )
        counts = store.data_counts(p)
        plan = diff(schema, vm, counts, current_version=schema.version)
        if dry_run:
            return {"dry_run": True, "version": schema.version, "report": plan.to_report()}
        with install_lock(p):
            applied = apply_plan(store, p, plan, policies_doc(vm))
        return {"dry_run": False, "version": applied.version, "report": plan.to_report()}

    @app.get("/projects/{p}/schema")
    def get_schema(p: str, request: Request):
        require_member(p, actor_of(request))
        return {"schema": store.get_schema_doc(p)}

    @app.get("/projects/{p}/form")
    def get_form(p: str, request: Request):
        require_member(p, actor_of(request))
        return {"form": store.get_form(p)}

    @app.get("/projects/{p}/configs")
    def get_configs(p: str, request: Request):
        require_member(p, actor_of(request))
        return {"configs": store.get_configs(p)}

    # -- members -------------------------------------------------------

    @app.get("/projects/{p}/members")
    def members(p: str, request: Request):
        require_member(p, actor_of(request))
        return {"members": store.list_members(p)}

    @app.post("/projects/{p}/members", status_code=201)
    def add_member(p: str, request: Request, body: dict = Body(...)):
        require_rank(p, actor_of(request), "admin")
        store.add_member(p, str(body.get("user") or ""), str(body.get("role") or ""))
        return {"members": store.list_members(p)}

    @app.put("/projects/{p}/members/{login}")
    def update_member(p: str, login: str, request: Request, body: dict = Body(...)):
        require_rank(p, actor_of(request), "admin")
        store.update_member(p, login, str(body.get("role") or ""))
        return {"members": store.list_members(p)}

    @app.delete("/projects/{p}/members/{login}")
    def remove_member(p: str, login: str, request: Request):
        require_rank(p, actor_of(request), "admin")
        store.remove_member(p, login)
        return {"members": store.list_members(p)}

    # -- corpus --------------------------------------------------------

    @app.post("/projects/{p}/papers/import")
    def import_papers(
        p: str,
        request: Request,
        body: bytes = Depends(_raw_body),
        format: str = Query(...),
    ):
        actor = actor_of(request)
        doc = _decode(body, request, "payload")
        return engine.import_papers(p, doc.get("payload") or "", format, actor)

    @app.get("/projects/{p}/papers")
    def papers(
        p: str,
        request: Request,
        page: int | None = Query(None, ge=1),
        page_size: int = Query(20, ge=1, le=200),
    ):
        require_member(p, actor_of(request))
        rows, total = engine.list_papers(p, page, page_size)
        return {"rows": rows, "total": total, "page": page, "page_size": page_size}

    # -- screening -----------------------------------------------------

    @app.post("/projects/{p}/phases/{ph}/assign", status_code=201)
    def auto_assign(p: str, ph: str, request: Request, body: dict | None = Body(None)):
        actor = actor_of(request)
        seed = (body or {}).get("seed")
        created = engine.auto_assign(p, ph, actor, seed)
        return {"created": [with_ref(p, a) for a in created], "count": len(created)}

    @app.post("/projects/{p}/phases/{ph}/assignments", status_code=201)
    def manual_assign(p: str, ph: str, request: Request, body: dict = Body(...)):
        actor = actor_of(request)
        record = engine.manual_assign(
            p, ph, int(body.get("paper_id") or 0), str(body.get("reviewer") or ""), actor
        )
        return {"assignment": with_ref(p, record)}

    @app.get("/projects/{p}/phases/{ph}/queue")
    def phase_queue(p: str, ph: str, request: Request):
        actor = actor_of(request)
        items = engine.queue(p, actor, ph)
        for item in items:
            item["assignment"] = with_ref(p, item["assignment"])
        return {"queue": items}

    @app.get("/projects/{p}/queue")
    def full_queue(p: str, request: Request):
        actor = actor_of(request)
        items = engine.queue(p, actor)
        for item in items:
            item["assignment"] = with_ref(p, item["assignment"])
        return {"queue": items}

    @app.post("/assignments/{a}/decision")
    def decide(a: str, request: Request, body: dict = Body(...)):
        actor = actor_of(request)
        project, _, raw = a.rpartition(":")
        if not project or not raw.isdigit():
            raise ApiError("E_NOT_FOUND", f"malformed assignment reference {a!r}")
        record = engine.submit_decision(
            project,
            int(raw),
            actor,
            body.get("verdict"),
            criterion=body.get("criterion"),
            note=body.get("note"),
        )
        return {"decision": record}

    @app.get("/projects/{p}/phases/{ph}/conflicts")
    def conflicts(p: str, ph: str, request: Request):
        actor = actor_of(request)
        return {"conflicts": engine.list_conflicts(p, ph, actor)}

    @app.post("/projects/{p}/phases/{ph}/conflicts/resolve")
    def resolve(p: str, ph: str, request: Request):
        actor = actor_of(request)
        return {"cases": engine.resolve_conflicts(p, ph, actor)}

    @app.post("/projects/{p}/phases/{ph}/validate", status_code=201)
    def sample_validation(p: str, ph: str, request: Request, body: dict | None = Body(None)):
        actor = actor_of(request)
        created = engine.sample_validation(p, ph, actor, (body or {}).get("seed"))
        return {"created": [with_ref(p, a) for a in created], "count": len(created)}

    @app.post("/projects/{p}/phases/{ph}/state")
    def phase_state(p: str, ph: str, request: Request, body: dict = Body(...)):
        actor = actor_of(request)
        engine.set_phase_state(p, ph, actor, str(body.get("status") or ""))
        return {"phase": ph, "status": body.get("status")}

    # -- classification ------------------------------------------------

    @app.get("/projects/{p}/papers/{paper_id}/classification")
    def get_classification(p: str, paper_id: int, request: Request):
        actor = actor_of(request)
        return {"record": engine.get_classification(p, paper_id, actor)}

    @app.put("/projects/{p}/papers/{paper_id}/classification")
    def put_classification(p: str, paper_id: int, request: Request, body: dict = Body(...)):
        actor = actor_of(request)
        record = engine.submit_classification(
            p,
            paper_id,
            actor,
            body.get("values") or {},
            mark_complete=bool(body.get("mark_complete")),
            expected_version=body.get("expected_version"),
        )
        return {"record": record}

    @app.post("/projects/{p}/categories/{c}/choices", status_code=201)
    def add_choice(p: str, c: str, request: Request, body: dict = Body(...)):
        actor = actor_of(request)
        choices = engine.add_dynamic_choice(p, c, body.get("value"), actor)
        return {"category": c, "choices": choices}

    # -- statistics ----------------------------------------------------

    @app.get("/projects/{p}/stats")
    @app.get("/projects/{p}/stats.json")
    def stats_json(p: str, request: Request):
        require_member(p, actor_of(request))
        return engine.export_stats(p, "json")

    @app.get("/projects/{p}/stats.csv")
    def stats_csv(p: str, request: Request):
        require_member(p, actor_of(request))
        return Response(engine.export_stats(p, "csv"), media_type="text/csv")

    # -- generic entity dispatch ---------------------------------------

    @app.get("/projects/{p}/entities/{entity}")
    def entity_list(
        p: str,
        entity: str,
        request: Request,
        page: int | None = Query(None, ge=1),
        page_size: int = Query(20, ge=1, le=200),
    ):
        require_member(p, actor_of(request))
        return generic_list(store, p, entity, page, page_size)

    @app.get("/projects/{p}/entities/{entity}/{key}")
    def entity_view(p: str, entity: str, key: str, request: Request):
        require_member(p, actor_of(request))
        return generic_view(store, p, entity, int(key) if key.isdigit() else key)

    @app.post("/projects/{p}/entities/{entity}/{op}")
    def entity_write(
        p: str, entity: str, op: str, request: Request, body: dict = Body(...)
    ):
        actor = actor_of(request)
        rank = require_member(p, actor)
        cfg = config_for(store, p, entity)
        if op not in cfg["operations"]:
            raise ApiError(E_UNKNOWN_OP, f"entity {entity!r} has no operation {op!r}")
        minimum = required_rank(entity, op)
        if minimum is None:
            raise ApiError(E_UNKNOWN_OP, f"operation {op!r} is not dispatchable")
        if not rank_at_least(rank, minimum):
            raise ApiError("E_FORBIDDEN", f"{entity}.{op} requires {minimum} rank")
        return {"result": generic_write(store, engine, p, entity, op, body, actor)}

    # -- static frontend -----------------------------------------------

    if config.static_dir and Path(config.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="app")
    else:

        @app.get("/")
        def root():
            return {"service": "srkit", "endpoints": "/auth/login, /projects, ..."}

    return app
