"""Namespaced persistence: one admin catalog plus one namespace per project.

Every namespace is an in-memory state image backed by an append-only JSONL
commit log. Mutations run inside transactions: per-namespace reentrant
locks serialize writers, an undo log restores state on failure, and the
buffered journal lines of the whole (possibly multi-namespace) transaction
are appended only on outermost commit. Opening a store replays the logs.

With ``data_dir=None`` the store is memory-only; the transaction semantics
are identical, nothing is written.
"""

from __future__ import annotations

import copy
import hashlib
import hmac
import json
import os
import secrets
import threading
import time
from contextlib import contextmanager
from pathlib import Path

from ..install import derive_entity_configs, derive_form
from ..install.elements import ACTIVE, ProjectSchema, empty_schema
from .errors import (
    E_CONFLICT,
    E_CONSTRAINT,
    E_DUPLICATE,
    E_ELEMENT_INACTIVE,
    E_LAST_ADMIN,
    E_NAME_TAKEN,
    E_NOT_FOUND,
    E_VERSION_STALE,
    StoreError,
)

# Sentinel membership role for project creators, remapped to the declared
# admin-rank role by the first schema install.
ADMIN_SENTINEL = "__admin__"

# Record containers that exist in every project regardless of the installed
# schema, with their allowed payload keys.
BUILTIN_ELEMENTS: dict[str, frozenset[str]] = {
    "entity.paper": frozenset(
        {"bibkey", "title", "authors", "venue", "year", "abstract", "link"}
    ),
    "entity.assignment": frozenset({"reviewer", "phase", "kind", "status", "purpose"}),
    "entity.decision": frozenset(
        {"assignment_id", "reviewer", "phase", "verdict", "criterion", "note"}
    ),
    "entity.classification": frozenset({"values", "completeness"}),
    "entity.conflict": frozenset(
        {"phase", "status", "origin", "escalation", "resolution"}
    ),
    "entity.phase_state": frozenset({"phase", "status"}),
    "entity.audit": frozenset({"event", "data"}),
}

PAPER_ELEMENT = "entity.paper"

_YEAR_RANGE = (1900, 2100)


class _Namespace:
    def __init__(self, name: str, log_path: Path | None):
        self.name = name
        self.log_path = log_path
        self.lock = threading.RLock()


class _AdminState(_Namespace):
    def __init__(self, log_path: Path | None):
        super().__init__("admin", log_path)
        self.users: dict[str, dict] = {}  # login -> user
        self.projects: dict[str, dict] = {}  # name -> project
        self.memberships: list[dict] = []  # {user, project, role}


class _ProjectState(_Namespace):
    def __init__(self, name: str, log_path: Path | None):
        super().__init__(name, log_path)
        self.schema: dict = empty_schema(name).to_dict()
        self.configs: list[dict] = [c.to_dict() for c in derive_entity_configs(self._obj())]
        self.form: dict = derive_form(self._obj()).to_dict()
        self.records: dict[int, dict] = {}
        self.next_id = 1
        self.bibkeys: dict[str, int] = {}  # bibkey -> record id

    def _obj(self) -> ProjectSchema:
        return ProjectSchema.from_dict(self.schema)


class _TxnState(threading.local):
    def __init__(self):
        self.depth = 0
        self.undo: list = []
        self.events: list = []  # (namespace, event dict)


def _now() -> float:
    return time.time()


class ProjectStore:
    def __init__(self, data_dir: str | Path | None = None, credential_cost: int = 14):
        self._data_dir = Path(data_dir) if data_dir is not None else None
        self._cost = credential_cost
        self._registry_lock = threading.Lock()
        admin_log = self._data_dir / "admin" / "log.jsonl" if self._data_dir else None
        self._admin = _AdminState(admin_log)
        self._projects: dict[str, _ProjectState] = {}
        self._txn = _TxnState()
        if self._data_dir is not None:
            self._replay()

    # ------------------------------------------------------------------
    # Transactions

    @contextmanager
    def transaction(self, project: str | None = None):
        """All-or-nothing scope; nested uses flatten into the outermost."""
        ns = self._admin if project is None else self._ns(project)
        st = self._txn
        ns.lock.acquire()
        st.depth += 1
        ok = False
        try:
            yield
            ok = True
        finally:
            st.depth -= 1
            try:
                if st.depth == 0:
                    try:
                        if ok:
                            self._flush(st.events)
                        else:
                            for fn in reversed(st.undo):
                                fn()
                    finally:
                        st.undo.clear()
                        st.events.clear()
            finally:
                ns.lock.release()

    def _record_undo(self, fn):
        self._txn.undo.append(fn)

    def _emit(self, ns: _Namespace, event: dict):
        if ns.log_path is not None:
            self._txn.events.append((ns, event))

    def _flush(self, events):
        if not events:
            return
        by_path: dict[Path, list[str]] = {}
        for ns, event in events:
            by_path.setdefault(ns.log_path, []).append(json.dumps(event, separators=(",", ":")))
        for path, lines in by_path.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "a", encoding="utf-8") as f:
                f.write("\n".join(lines) + "\n")
                f.flush()
                os.fsync(f.fileno())

    # ------------------------------------------------------------------
    # Replay

    def _replay(self):
        admin_log = self._admin.log_path
        if admin_log is not None and admin_log.exists():
            for event in _read_log(admin_log):
                self._apply_admin_event(event)
        projects_dir = self._data_dir / "projects"
        if projects_dir.is_dir():
            for path in sorted(projects_dir.iterdir()):
                name = path.name
                ns = self._projects.get(name)
                if ns is None:
                    ns = _ProjectState(name, path / "log.jsonl")
                    self._projects[name] = ns
                log = path / "log.jsonl"
                if log.exists():
                    for event in _read_log(log):
                        self._apply_project_event(ns, event)
        for name, proj in self._admin.projects.items():
            ns = self._projects.get(name)
            if ns is not None:
                proj["version"] = ns.schema["version"]

    def _apply_admin_event(self, e: dict):
        op = e["op"]
        if op == "user_add":
            self._admin.users[e["user"]["login"]] = e["user"]
        elif op == "user_mod":
            self._admin.users[e["login"]].update(e["fields"])
        elif op == "project_add":
            self._admin.projects[e["project"]["name"]] = e["project"]
            if e["project"]["name"] not in self._projects:
                path = None
                if self._data_dir is not None:
                    path = self._data_dir / "projects" / e["project"]["name"] / "log.jsonl"
                self._projects[e["project"]["name"]] = _ProjectState(
                    e["project"]["name"], path
                )
        elif op == "member_add":
            self._admin.memberships.append(e["member"])
        elif op == "member_mod":
            for m in self._admin.memberships:
                if m["user"] == e["user"] and m["project"] == e["project"]:
                    m["role"] = e["role"]
        elif op == "member_del":
            self._admin.memberships = [
                m
                for m in self._admin.memberships
                if not (m["user"] == e["user"] and m["project"] == e["project"])
            ]

    def _apply_project_event(self, ns: _ProjectState, e: dict):
        op = e["op"]
        if op == "schema":
            ns.schema = e["schema"]
            ns.configs = e["configs"]
            ns.form = e["form"]
        elif op == "rec_add":
            rec = e["record"]
            ns.records[rec["id"]] = rec
            ns.next_id = max(ns.next_id, rec["id"] + 1)
            if rec["element_id"] == PAPER_ELEMENT:
                ns.bibkeys[rec["payload"]["bibkey"]] = rec["id"]
        elif op == "rec_mod":
            rec = ns.records[e["id"]]
            old_bibkey = (
                rec["payload"].get("bibkey") if rec["element_id"] == PAPER_ELEMENT else None
            )
            rec["payload"] = e["payload"]
            rec["refs"] = e["refs"]
            rec["record_version"] = e["record_version"]
            rec["updated_at"] = e["updated_at"]
            if old_bibkey is not None:
                del ns.bibkeys[old_bibkey]
                ns.bibkeys[rec["payload"]["bibkey"]] = rec["id"]
        elif op == "rec_del":
            rec = ns.records.pop(e["id"])
            if rec["element_id"] == PAPER_ELEMENT:
                ns.bibkeys.pop(rec["payload"].get("bibkey"), None)

    # ------------------------------------------------------------------
    # Users

    def create_user(self, login: str, password: str, display_name: str | None = None) -> str:
        with self.transaction(None):
            if login in self._admin.users:
                raise StoreError(E_NAME_TAKEN, f"login {login!r} already exists")
            salt = secrets.token_hex(16)
            user = {
                "login": login,
                "display_name": display_name or login,
                "salt": salt,
                "hash": self._hash(password, salt),
            }
            self._admin.users[login] = user
            self._record_undo(lambda: self._admin.users.pop(login, None))
            self._emit(self._admin, {"op": "user_add", "user": user})
            return login

    def set_password(self, login: str, password: str):
        with self.transaction(None):
            user = self._admin.users.get(login)
            if user is None:
                raise StoreError(E_NOT_FOUND, f"no user {login!r}")
            old = {"salt": user["salt"], "hash": user["hash"]}
            fields = {"salt": secrets.token_hex(16)}
            fields["hash"] = self._hash(password, fields["salt"])
            user.update(fields)
            self._record_undo(lambda: user.update(old))
            self._emit(self._admin, {"op": "user_mod", "login": login, "fields": fields})

    def verify_credentials(self, login: str, password: str) -> dict | None:
        with self._admin.lock:
            user = self._admin.users.get(login)
            if user is None:
                return None
            if hmac.compare_digest(self._hash(password, user["salt"]), user["hash"]):
                return self.public_user(login)
            return None

    def _hash(self, password: str, salt: str) -> str:
        return hashlib.scrypt(
            password.encode(), salt=bytes.fromhex(salt), n=2**self._cost, r=8, p=1
        ).hex()

    def public_user(self, login: str) -> dict:
        with self._admin.lock:
            user = self._admin.users.get(login)
            if user is None:
                raise StoreError(E_NOT_FOUND, f"no user {login!r}")
            return {"id": login, "login": login, "display_name": user["display_name"]}

    def list_users(self) -> list[dict]:
        with self._admin.lock:
            return [self.public_user(login) for login in sorted(self._admin.users)]

    def has_user(self, login: str) -> bool:
        with self._admin.lock:
            return login in self._admin.users

    # ------------------------------------------------------------------
    # Projects and memberships

    def create_project(self, name: str, label: str, creator: str) -> str:
        with self.transaction(None):
            if name in self._admin.projects:
                raise StoreError(E_NAME_TAKEN, f"project name {name!r} already used")
            if creator not in self._admin.users:
                raise StoreError(E_NOT_FOUND, f"no user {creator!r}")
            project = {"name": name, "label": label, "version": 0}
            path = None
            if self._data_dir is not None:
                path = self._data_dir / "projects" / name / "log.jsonl"
            ns = _ProjectState(name, path)
            self._admin.projects[name] = project
            with self._registry_lock:
                self._projects[name] = ns
            member = {"user": creator, "project": name, "role": ADMIN_SENTINEL}
            self._admin.memberships.append(member)

            def undo():
                self._admin.projects.pop(name, None)
                with self._registry_lock:
                    self._projects.pop(name, None)
                if member in self._admin.memberships:
                    self._admin.memberships.remove(member)

            self._record_undo(undo)
            self._emit(self._admin, {"op": "project_add", "project": project})
            self._emit(self._admin, {"op": "member_add", "member": member})
            return name

    def get_project(self, name: str) -> dict:
        with self._admin.lock:
            project = self._admin.projects.get(name)
            if project is None:
                raise StoreError(E_NOT_FOUND, f"no project {name!r}")
            return dict(project)

    def list_projects(self) -> list[dict]:
        with self._admin.lock:
            return [dict(p) for _, p in sorted(self._admin.projects.items())]

    def list_projects_for(self, login: str) -> list[dict]:
        with self._admin.lock:
            names = {m["project"] for m in self._admin.memberships if m["user"] == login}
            return [dict(self._admin.projects[n]) for n in sorted(names)]

    def add_member(self, project: str, login: str, role: str):
        with self.transaction(project), self.transaction(None):
            if login not in self._admin.users:
                raise StoreError(E_NOT_FOUND, f"no user {login!r}")
            if any(
                m["user"] == login and m["project"] == project
                for m in self._admin.memberships
            ):
                raise StoreError(E_NAME_TAKEN, f"{login!r} is already a member")
            self._check_role(project, role)
            member = {"user": login, "project": project, "role": role}
            self._admin.memberships.append(member)
            self._record_undo(lambda: self._admin.memberships.remove(member))
            self._emit(self._admin, {"op": "member_add", "member": member})

    def update_member(self, project: str, login: str, role: str):
        with self.transaction(project), self.transaction(None):
            member = self._find_member(project, login)
            self._check_role(project, role)
            old = member["role"]
            if old != role and self._is_admin_role(project, old):
                self._require_other_admin(project, login)
            member["role"] = role
            self._record_undo(lambda: member.update({"role": old}))
            self._emit(
                self._admin,
                {"op": "member_mod", "user": login, "project": project, "role": role},
            )

    def remove_member(self, project: str, login: str):
        with self.transaction(project), self.transaction(None):
            member = self._find_member(project, login)
            if self._is_admin_role(project, member["role"]):
                self._require_other_admin(project, login)
            self._admin.memberships.remove(member)
            self._record_undo(lambda: self._admin.memberships.append(member))
            self._emit(
                self._admin, {"op": "member_del", "user": login, "project": project}
            )

    def list_members(self, project: str) -> list[dict]:
        self._ns(project)
        with self._admin.lock:
            return sorted(
                (dict(m) for m in self._admin.memberships if m["project"] == project),
                key=lambda m: m["user"],
            )

    def member_role(self, project: str, login: str) -> str | None:
        with self._admin.lock:
            for m in self._admin.memberships:
                if m["project"] == project and m["user"] == login:
                    return m["role"]
            return None

    def _find_member(self, project: str, login: str) -> dict:
        self._ns(project)
        for m in self._admin.memberships:
            if m["project"] == project and m["user"] == login:
                return m
        raise StoreError(E_NOT_FOUND, f"{login!r} is not a member of {project!r}")

    def _role_elements(self, project: str) -> dict[str, dict]:
        ns = self._ns(project)
        out = {}
        for e in ns.schema["elements"]:
            if e["kind"] == "role" and e["status"] == ACTIVE:
                out[e["descriptor"]["name"]] = e
        return out

    def _check_role(self, project: str, role: str):
        if role == ADMIN_SENTINEL:
            return
        if role not in self._role_elements(project):
            raise StoreError(E_NOT_FOUND, f"no active role {role!r} in {project!r}")

    def _is_admin_role(self, project: str, role: str) -> bool:
        if role == ADMIN_SENTINEL:
            return True
        e = self._role_elements(project).get(role)
        return e is not None and e["descriptor"]["rank"] == "admin"

    def _require_other_admin(self, project: str, excluding: str):
        for m in self._admin.memberships:
            if (
                m["project"] == project
                and m["user"] != excluding
                and self._is_admin_role(project, m["role"])
            ):
                return
        raise StoreError(E_LAST_ADMIN, "a project must keep at least one admin member")

    # ------------------------------------------------------------------
    # Schema documents

    def _ns(self, project: str) -> _ProjectState:
        with self._registry_lock:
            ns = self._projects.get(project)
        if ns is None:
            raise StoreError(E_NOT_FOUND, f"no project {project!r}")
        return ns

    def get_schema(self, project: str) -> ProjectSchema:
        ns = self._ns(project)
        with ns.lock:
            return ProjectSchema.from_dict(copy.deepcopy(ns.schema))

    def get_schema_doc(self, project: str) -> dict:
        ns = self._ns(project)
        with ns.lock:
            return copy.deepcopy(ns.schema)

    def get_configs(self, project: str) -> list[dict]:
        ns = self._ns(project)
        with ns.lock:
            return copy.deepcopy(ns.configs)

    def get_form(self, project: str) -> dict:
        ns = self._ns(project)
        with ns.lock:
            return copy.deepcopy(ns.form)

    def install_schema(self, project: str, schema: dict, configs: list[dict], form: dict):
        ns = self._ns(project)
        with self.transaction(project):
            old = (ns.schema, ns.configs, ns.form)
            ns.schema = copy.deepcopy(schema)
            ns.configs = copy.deepcopy(configs)
            ns.form = copy.deepcopy(form)

            def undo():
                ns.schema, ns.configs, ns.form = old

            self._record_undo(undo)
            self._emit(
                ns,
                {"op": "schema", "schema": ns.schema, "configs": ns.configs, "form": ns.form},
            )
            self._sync_admin_after_install(project, ns)

    def _sync_admin_after_install(self, project: str, ns: _ProjectState):
        admin_roles = [
            e["descriptor"]["name"]
            for e in ns.schema["elements"]
            if e["kind"] == "role"
            and e["status"] == ACTIVE
            and e["descriptor"]["rank"] == "admin"
        ]
        with self.transaction(None):
            proj = self._admin.projects[project]
            old_version = proj["version"]
            proj["version"] = ns.schema["version"]
            proj["label"] = ns.schema.get("policies", {}).get("label", proj["label"])
            self._record_undo(lambda: proj.update({"version": old_version}))
            if admin_roles:
                for m in self._admin.memberships:
                    if m["project"] == project and m["role"] == ADMIN_SENTINEL:
                        m["role"] = admin_roles[0]
                        self._record_undo(
                            lambda m=m: m.update({"role": ADMIN_SENTINEL})
                        )
                        self._emit(
                            self._admin,
                            {
                                "op": "member_mod",
                                "user": m["user"],
                                "project": project,
                                "role": m["role"],
                            },
                        )

    def set_element_status(self, project: str, element_id: str, status: str):
        ns = self._ns(project)
        with self.transaction(project):
            target = None
            for e in ns.schema["elements"]:
                if e["id"] == element_id:
                    target = e
                    break
            if target is None:
                raise StoreError(E_NOT_FOUND, f"no element {element_id!r}")
            old = target["status"]
            target["status"] = status
            self._record_undo(lambda: target.update({"status": old}))
            self._emit(
                ns,
                {"op": "schema", "schema": ns.schema, "configs": ns.configs, "form": ns.form},
            )

    # ------------------------------------------------------------------
    # Records

    def _element_entry(self, ns: _ProjectState, element_id: str) -> tuple[set[str], str]:
        """Allowed payload keys and status for an element id."""
        builtin = BUILTIN_ELEMENTS.get(element_id)
        if builtin is not None:
            return set(builtin), ACTIVE
        for e in ns.schema["elements"]:
            if e["id"] == element_id:
                if e["kind"] == "category":
                    return {"value"}, e["status"]
                return set(), e["status"]
        raise StoreError(E_NOT_FOUND, f"no element {element_id!r}")

    def _check_payload(self, ns: _ProjectState, element_id: str, payload: dict, writing: bool):
        allowed, status = self._element_entry(ns, element_id)
        if writing and status != ACTIVE:
            raise StoreError(E_ELEMENT_INACTIVE, f"element {element_id!r} is deactivated")
        extra = set(payload) - allowed
        if extra:
            raise StoreError(
                E_CONSTRAINT,
                f"payload keys {sorted(extra)} not allowed for {element_id!r}",
            )
        if element_id == PAPER_ELEMENT:
            self._check_paper(payload)

    def _check_paper(self, payload: dict):
        title = payload.get("title")
        if not isinstance(title, str) or not title.strip():
            raise StoreError(E_CONSTRAINT, "paper title must be non-empty")
        bibkey = payload.get("bibkey")
        if not isinstance(bibkey, str) or not bibkey.strip():
            raise StoreError(E_CONSTRAINT, "paper bibkey must be non-empty")
        year = payload.get("year")
        if year is not None:
            if not isinstance(year, int) or isinstance(year, bool):
                raise StoreError(E_CONSTRAINT, "paper year must be an integer")
            if not _YEAR_RANGE[0] <= year <= _YEAR_RANGE[1]:
                raise StoreError(
                    E_CONSTRAINT,
                    f"paper year must lie in [{_YEAR_RANGE[0]}, {_YEAR_RANGE[1]}]",
                )

    def add_record(
        self,
        project: str,
        element_id: str,
        payload: dict,
        created_by: str,
        paper_id: int | None = None,
        refs: list[str] | tuple[str, ...] = (),
    ) -> dict:
        ns = self._ns(project)
        with self.transaction(project):
            self._check_payload(ns, element_id, payload, writing=True)
            if element_id == PAPER_ELEMENT and payload["bibkey"] in ns.bibkeys:
                raise StoreError(
                    E_DUPLICATE, f"bibkey {payload['bibkey']!r} already imported"
                )
            rec = {
                "id": ns.next_id,
                "element_id": element_id,
                "paper_id": paper_id,
                "payload": copy.deepcopy(payload),
                "refs": list(refs),
                "record_version": 1,
                "created_by": created_by,
                "created_at": _now(),
                "updated_at": _now(),
            }
            ns.next_id += 1
            ns.records[rec["id"]] = rec
            if element_id == PAPER_ELEMENT:
                ns.bibkeys[payload["bibkey"]] = rec["id"]

            def undo():
                ns.records.pop(rec["id"], None)
                ns.next_id = rec["id"]
                if element_id == PAPER_ELEMENT:
                    ns.bibkeys.pop(payload["bibkey"], None)

            self._record_undo(undo)
            self._emit(ns, {"op": "rec_add", "record": rec})
            return copy.deepcopy(rec)

    def modify_record(
        self,
        project: str,
        record_id: int,
        payload: dict,
        expected_version: int,
        refs: list[str] | None = None,
    ) -> dict:
        ns = self._ns(project)
        with self.transaction(project):
            rec = ns.records.get(record_id)
            if rec is None:
                raise StoreError(E_NOT_FOUND, f"no record {record_id}")
            if rec["record_version"] != expected_version:
                raise StoreError(
                    E_VERSION_STALE,
                    f"record {record_id} is at version {rec['record_version']}, "
                    f"caller expected {expected_version}",
                )
            self._check_payload(ns, rec["element_id"], payload, writing=True)
            if rec["element_id"] == PAPER_ELEMENT:
                holder = ns.bibkeys.get(payload["bibkey"])
                if holder is not None and holder != record_id:
                    raise StoreError(
                        E_DUPLICATE, f"bibkey {payload['bibkey']!r} already imported"
                    )
            old = {
                "payload": rec["payload"],
                "refs": rec["refs"],
                "record_version": rec["record_version"],
                "updated_at": rec["updated_at"],
            }
            old_bibkey = (
                rec["payload"].get("bibkey")
                if rec["element_id"] == PAPER_ELEMENT
                else None
            )
            rec["payload"] = copy.deepcopy(payload)
            if refs is not None:
                rec["refs"] = list(refs)
            rec["record_version"] += 1
            rec["updated_at"] = _now()
            if old_bibkey is not None:
                del ns.bibkeys[old_bibkey]
                ns.bibkeys[payload["bibkey"]] = record_id

            def undo():
                rec.update(old)
                if old_bibkey is not None:
                    ns.bibkeys.pop(payload["bibkey"], None)
                    ns.bibkeys[old_bibkey] = record_id

            self._record_undo(undo)
            self._emit(
                ns,
                {
                    "op": "rec_mod",
                    "id": record_id,
                    "payload": rec["payload"],
                    "refs": rec["refs"],
                    "record_version": rec["record_version"],
                    "updated_at": rec["updated_at"],
                },
            )
            return copy.deepcopy(rec)

    def remove_record(self, project: str, record_id: int):
        ns = self._ns(project)
        with self.transaction(project):
            rec = ns.records.get(record_id)
            if rec is None:
                raise StoreError(E_NOT_FOUND, f"no record {record_id}")
            _, status = self._element_entry(ns, rec["element_id"])
            if status != ACTIVE:
                raise StoreError(
                    E_ELEMENT_INACTIVE,
                    f"records of deactivated element {rec['element_id']!r} are retained",
                )
            del ns.records[record_id]
            if rec["element_id"] == PAPER_ELEMENT:
                ns.bibkeys.pop(rec["payload"].get("bibkey"), None)

            def undo():
                ns.records[record_id] = rec
                if rec["element_id"] == PAPER_ELEMENT:
                    ns.bibkeys[rec["payload"]["bibkey"]] = record_id

            self._record_undo(undo)
            self._emit(ns, {"op": "rec_del", "id": record_id})

    def get_record(self, project: str, record_id: int) -> dict:
        ns = self._ns(project)
        with ns.lock:
            rec = ns.records.get(record_id)
            if rec is None:
                raise StoreError(E_NOT_FOUND, f"no record {record_id}")
            return copy.deepcopy(rec)

    def list_records(
        self,
        project: str,
        element_id: str | None = None,
        paper_id: int | None = None,
        where=None,
        page: int | None = None,
        page_size: int = 20,
    ) -> tuple[list[dict], int]:
        """Stable-ordered listing; returns (records, total before paging)."""
        ns = self._ns(project)
        with ns.lock:
            rows = [
                r
                for r in ns.records.values()
                if (element_id is None or r["element_id"] == element_id)
                and (paper_id is None or r["paper_id"] == paper_id)
                and (where is None or where(r))
            ]
            rows.sort(key=lambda r: (r["created_at"], r["id"]))
            total = len(rows)
            if page is not None:
                if page < 1:
                    raise StoreError(E_CONSTRAINT, "page numbers start at 1")
                rows = rows[(page - 1) * page_size : page * page_size]
            return copy.deepcopy(rows), total

    def count_records(self, project: str, element_id: str) -> int:
        ns = self._ns(project)
        with ns.lock:
            self._element_entry(ns, element_id)  # E_NOT_FOUND for dropped elements
            return sum(
                1
                for r in ns.records.values()
                if r["element_id"] == element_id or element_id in r["refs"]
            ) + self._membership_counts(project, ns).get(element_id, 0)

    def data_counts(self, project: str) -> dict[str, int]:
        ns = self._ns(project)
        with ns.lock:
            counts = self._membership_counts(project, ns)
            for r in ns.records.values():
                counts[r["element_id"]] = counts.get(r["element_id"], 0) + 1
                for ref in r["refs"]:
                    counts[ref] = counts.get(ref, 0) + 1
            return counts

    def _membership_counts(self, project: str, ns: _ProjectState) -> dict[str, int]:
        """Memberships pin their role element: a role with members holds
        data for migration purposes and may only be deactivated."""
        by_name: dict[str, str] = {}
        for e in ns.schema["elements"]:
            if e["kind"] == "role":
                name = e["descriptor"]["name"]
                if name not in by_name or e["status"] == ACTIVE:
                    by_name[name] = e["id"]
        counts: dict[str, int] = {}
        with self._admin.lock:
            for m in self._admin.memberships:
                if m["project"] == project and m["role"] in by_name:
                    counts[by_name[m["role"]]] = counts.get(by_name[m["role"]], 0) + 1
        return counts


def _read_log(path: Path):
    with open(path, encoding="utf-8") as f:
        lines = f.read().split("\n")
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError:
            if i == len(lines) - 1 or all(not l.strip() for l in lines[i + 1 :]):
                return  # torn tail from an interrupted append
            raise StoreError(E_CONFLICT, f"corrupt journal {path} at line {i + 1}")
