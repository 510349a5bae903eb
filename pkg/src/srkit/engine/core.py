"""Review workflow over installed projects.

One decision record per assignment, revised in place while the phase is
open. Conflict state is one record per (paper, phase): it opens when the
committed non-arbitration verdicts disagree, withdraws when they agree
again, and a decision on an arbitration assignment finalizes it. A paper's
outcome in a phase is its conflict resolution if one stands, otherwise the
unanimous verdict of its fully decided screening assignments, otherwise
pending. Papers enter phase n+1 only when included in phase n.
"""

from __future__ import annotations

import secrets
from fractions import Fraction

from ..install.elements import ACTIVE, ProjectSchema, choice_descriptor, choice_id
from ..install.forms import FormDescriptor
from ..install.migrate import ADD, REACTIVATE, MigrationOp, MigrationPlan, apply_plan
from ..store import ADMIN_SENTINEL, E_ELEMENT_INACTIVE, PAPER_ELEMENT, ProjectStore
from .assign import balanced_assignment
from .classify import validate_values, value_refs
from .conflicts import resolve_verdicts
from .errors import (
    E_CONSTRAINT,
    E_CRITERION_ON_INCLUDE,
    E_CRITERION_REQUIRED,
    E_DUPLICATE,
    E_DUPLICATE_CHOICE,
    E_FORBIDDEN,
    E_FORMAT,
    E_MANUAL_MODE,
    E_NO_ARBITER,
    E_NO_POLICY,
    E_NO_VALIDATOR,
    E_NOT_ASSIGNED,
    E_NOT_DYNAMIC,
    E_NOT_FOUND,
    E_PHASE_CLOSED,
    E_TOO_FEW_REVIEWERS,
    ClassificationError,
    EngineError,
)
from .imports import normalized_title_year, parse_bibtex, parse_csv
from .rng import SplitMix64
from .stats import PhaseStats, stats_to_csv, stats_to_json

ASSIGNMENT = "entity.assignment"
DECISION = "entity.decision"
CLASSIFICATION = "entity.classification"
CONFLICT = "entity.conflict"
PHASE_STATE = "entity.phase_state"
AUDIT = "entity.audit"

SCREENING = "screening"
VALIDATION = "validation"
ARBITRATION = "arbitration"  # purpose marker for escalation assignments

OPEN = "open"
RESOLVED = "resolved"


def validation_share(percentage, population: int) -> int:
    """How many papers a percentage policy samples from a population.

    Rounds up, so any nonzero percentage over a nonempty pool audits at
    least one paper. Exact rational arithmetic: 33 percent of 3 papers is
    0.99, which must round to 1, not float-drift to 0 or 2.
    """
    return int(-(-Fraction(str(percentage)) * population // 100))
WITHDRAWN = "withdrawn"


class _View:
    """Snapshot of one project's workflow records."""

    def __init__(self, store: ProjectStore, project: str):
        self.papers, _ = store.list_records(project, PAPER_ELEMENT)
        self.assignments, _ = store.list_records(project, ASSIGNMENT)
        self.decisions, _ = store.list_records(project, DECISION)
        self.conflicts, _ = store.list_records(project, CONFLICT)
        self.by_assignment = {
            d["payload"]["assignment_id"]: d for d in self.decisions
        }
        self.cases = {
            (c["paper_id"], c["payload"]["phase"]): c for c in self.conflicts
        }

    def assignments_for(self, phase: str, paper_id=None, kind=None, purpose=None):
        return [
            a
            for a in self.assignments
            if a["payload"]["phase"] == phase
            and (paper_id is None or a["paper_id"] == paper_id)
            and (kind is None or a["payload"]["kind"] == kind)
            and (purpose is None or a["payload"]["purpose"] == purpose)
        ]

    def vote_decisions(self, phase: str, paper_id) -> list[dict]:
        """Committed decisions that count as verdicts: every decided
        assignment except arbitration ones."""
        out = []
        for a in self.assignments_for(phase, paper_id):
            if a["payload"]["purpose"] == ARBITRATION:
                continue
            d = self.by_assignment.get(a["id"])
            if d is not None and a["payload"]["status"] == "done":
                out.append(d)
        return out

    def outcome(self, phase: str, paper_id) -> str:
        case = self.cases.get((paper_id, phase))
        if case is not None:
            status = case["payload"]["status"]
            if status == OPEN:
                return "pending"
            if status == RESOLVED:
                verdict = case["payload"]["resolution"]["verdict"]
                return "included" if verdict == "include" else "excluded"
        screening = self.assignments_for(phase, paper_id, kind=SCREENING)
        if not screening:
            return "pending"
        verdicts = []
        for a in screening:
            if a["payload"]["status"] != "done":
                return "pending"
            d = self.by_assignment.get(a["id"])
            if d is None:
                return "pending"
            verdicts.append(d["payload"]["verdict"])
        if len(set(verdicts)) == 1:
            return "included" if verdicts[0] == "include" else "excluded"
        return "pending"


class ReviewEngine:
    def __init__(self, store: ProjectStore):
        self.store = store

    # ------------------------------------------------------------------
    # Project plumbing

    def _installed(self, project: str) -> ProjectSchema:
        schema = self.store.get_schema(project)
        if schema.version == 0:
            raise EngineError(E_NOT_FOUND, f"project {project!r} has no installed configuration")
        return schema

    def _rank(self, project: str, actor: str, schema: ProjectSchema | None = None) -> str | None:
        role = self.store.member_role(project, actor)
        if role is None:
            return None
        if role == ADMIN_SENTINEL:
            return "admin"
        schema = schema or self.store.get_schema(project)
        best = None
        for e in schema.elements:
            if e.kind == "role" and e.descriptor["name"] == role:
                best = e.descriptor["rank"]
                if e.status == ACTIVE:
                    break
        return best

    def member_rank(self, project: str, actor: str) -> str | None:
        return self._rank(project, actor)

    def _require_rank(self, project, actor, ranks=None, schema=None) -> str:
        rank = self._rank(project, actor, schema)
        if rank is None:
            raise EngineError(E_FORBIDDEN, f"{actor!r} is not a member of {project!r}")
        if ranks is not None and rank not in ranks:
            raise EngineError(E_FORBIDDEN, f"operation requires rank {' or '.join(ranks)}")
        return rank

    def _phases(self, schema: ProjectSchema):
        return schema.active("phase")

    def _phase_by_name(self, schema: ProjectSchema, name: str):
        for e in self._phases(schema):
            if e.descriptor["name"] == name:
                return e
        raise EngineError(E_NOT_FOUND, f"no phase {name!r}")

    def _phase_open(self, project: str, phase_eid: str) -> bool:
        states, _ = self.store.list_records(
            project, PHASE_STATE, where=lambda r: r["payload"]["phase"] == phase_eid
        )
        return not states or states[-1]["payload"]["status"] != "closed"

    def set_phase_state(self, project: str, phase: str, actor: str, status: str):
        if status not in ("open", "closed"):
            raise EngineError(E_CONSTRAINT, "phase status must be 'open' or 'closed'")
        schema = self._installed(project)
        self._require_rank(project, actor, ("admin",), schema)
        eid = self._phase_by_name(schema, phase).id
        with self.store.transaction(project):
            self.store.add_record(
                project, PHASE_STATE, {"phase": eid, "status": status}, actor, refs=[eid]
            )

    def _members(self, project: str) -> list[str]:
        return [m["user"] for m in self.store.list_members(project)]

    def _role_holders(self, project: str, role_name: str) -> list[str]:
        return [
            m["user"]
            for m in self.store.list_members(project)
            if m["role"] == role_name
        ]

    def _population(self, view: _View, phases, phase_eid: str) -> list[int]:
        ids = sorted(p["id"] for p in view.papers)
        for ph in phases:
            if ph.id == phase_eid:
                return ids
            ids = [pid for pid in ids if view.outcome(ph.id, pid) == "included"]
        raise EngineError(E_NOT_FOUND, f"phase {phase_eid!r} not active")

    # ------------------------------------------------------------------
    # Corpus import

    def import_papers(self, project: str, payload: str, format: str, actor: str) -> dict:
        schema = self._installed(project)
        self._require_rank(project, actor, ("admin",), schema)
        if format == "csv":
            rows, rejects = parse_csv(payload)
        elif format == "bibtex":
            rows, rejects = parse_bibtex(payload)
        else:
            raise EngineError(E_FORMAT, f"unknown import format {format!r}")
        rejects = list(rejects)
        imported = 0
        with self.store.transaction(project):
            papers, _ = self.store.list_records(project, PAPER_ELEMENT)
            seen_keys = {p["payload"]["bibkey"] for p in papers}
            seen_titles = {
                normalized_title_year(p["payload"]["title"], p["payload"]["year"])
                for p in papers
            }
            for row in rows:
                line = row.pop("line")
                tkey = normalized_title_year(row["title"], row["year"])
                if row["bibkey"] in seen_keys:
                    rejects.append((line, "duplicate bibkey"))
                    continue
                if tkey in seen_titles:
                    rejects.append((line, "duplicate title+year"))
                    continue
                self.store.add_record(project, PAPER_ELEMENT, row, actor)
                seen_keys.add(row["bibkey"])
                seen_titles.add(tkey)
                imported += 1
        rejects.sort(key=lambda r: r[0])
        return {"imported": imported, "rejected": [list(r) for r in rejects]}

    def list_papers(self, project: str, page: int | None = None, page_size: int = 20):
        self._installed(project)
        return self.store.list_records(project, PAPER_ELEMENT, page=page, page_size=page_size)

    # ------------------------------------------------------------------
    # Assignment

    def auto_assign(self, project: str, phase: str, actor: str, seed: int | None = None) -> list[dict]:
        schema = self._installed(project)
        self._require_rank(project, actor, ("admin",), schema)
        policy = schema.policies["assignment"]
        if policy["mode"] != "automatic":
            raise EngineError(E_MANUAL_MODE, "assignment mode is manual")
        phase_el = self._phase_by_name(schema, phase)
        if not self._phase_open(project, phase_el.id):
            raise EngineError(E_PHASE_CLOSED, f"phase {phase!r} is closed")
        k = policy["reviewers_per_paper"]
        members = self._members(project)
        if len(members) < k:
            raise EngineError(
                E_TOO_FEW_REVIEWERS, f"{k} reviewers per paper but only {len(members)} members"
            )
        if seed is None:
            seed = secrets.randbits(63)
        created: list[dict] = []
        with self.store.transaction(project):
            view = _View(self.store, project)
            population = self._population(view, self._phases(schema), phase_el.id)
            assigned = {
                a["paper_id"] for a in view.assignments_for(phase_el.id, kind=SCREENING)
            }
            todo = [pid for pid in population if pid not in assigned]
            load: dict[str, int] = {}
            for a in view.assignments_for(phase_el.id, kind=SCREENING):
                load[a["payload"]["reviewer"]] = load.get(a["payload"]["reviewer"], 0) + 1
            for paper_id, reviewer in balanced_assignment(todo, members, k, load, seed):
                created.append(
                    self.store.add_record(
                        project,
                        ASSIGNMENT,
                        {
                            "reviewer": reviewer,
                            "phase": phase_el.id,
                            "kind": SCREENING,
                            "status": "pending",
                            "purpose": SCREENING,
                        },
                        actor,
                        paper_id=paper_id,
                        refs=[phase_el.id],
                    )
                )
            self.store.add_record(
                project,
                AUDIT,
                {"event": "auto_assign", "data": {"phase": phase, "seed": seed, "count": len(created)}},
                actor,
            )
        return created

    def manual_assign(self, project: str, phase: str, paper_id: int, reviewer: str, actor: str) -> dict:
        schema = self._installed(project)
        self._require_rank(project, actor, ("admin", "senior"), schema)
        if self.store.member_role(project, reviewer) is None:
            raise EngineError(E_FORBIDDEN, f"{reviewer!r} is not a member of {project!r}")
        phase_el = self._phase_by_name(schema, phase)
        if not self._phase_open(project, phase_el.id):
            raise EngineError(E_PHASE_CLOSED, f"phase {phase!r} is closed")
        with self.store.transaction(project):
            paper = self.store.get_record(project, paper_id)
            if paper["element_id"] != PAPER_ELEMENT:
                raise EngineError(E_NOT_FOUND, f"record {paper_id} is not a paper")
            dup, _ = self.store.list_records(
                project,
                ASSIGNMENT,
                paper_id=paper_id,
                where=lambda r: r["payload"]["reviewer"] == reviewer
                and r["payload"]["phase"] == phase_el.id
                and r["payload"]["kind"] == SCREENING,
            )
            if dup:
                raise EngineError(E_DUPLICATE, "assignment already exists")
            return self.store.add_record(
                project,
                ASSIGNMENT,
                {
                    "reviewer": reviewer,
                    "phase": phase_el.id,
                    "kind": SCREENING,
                    "status": "pending",
                    "purpose": SCREENING,
                },
                actor,
                paper_id=paper_id,
                refs=[phase_el.id],
            )

    def queue(self, project: str, actor: str, phase: str | None = None) -> list[dict]:
        schema = self._installed(project)
        self._require_rank(project, actor, schema=schema)
        phase_eid = self._phase_by_name(schema, phase).id if phase else None
        rows, _ = self.store.list_records(
            project,
            ASSIGNMENT,
            where=lambda r: r["payload"]["reviewer"] == actor
            and r["payload"]["status"] == "pending"
            and (phase_eid is None or r["payload"]["phase"] == phase_eid),
        )
        papers = {p["id"]: p for p in self.store.list_records(project, PAPER_ELEMENT)[0]}
        names = {e.id: e.descriptor["name"] for e in self._phases(schema)}
        out = []
        for a in rows:
            paper = papers.get(a["paper_id"])
            out.append(
                {
                    "assignment": a,
                    "phase": names.get(a["payload"]["phase"], a["payload"]["phase"]),
                    "paper": paper,
                }
            )
        return out

    # ------------------------------------------------------------------
    # Decisions and conflicts

    def submit_decision(
        self,
        project: str,
        assignment_id: int,
        actor: str,
        verdict: str,
        criterion: str | None = None,
        note: str | None = None,
    ) -> dict:
        schema = self._installed(project)
        self._require_rank(project, actor, schema=schema)
        if verdict not in ("include", "exclude"):
            raise EngineError(E_CONSTRAINT, "verdict must be 'include' or 'exclude'")
        with self.store.transaction(project):
            assignment = self.store.get_record(project, assignment_id)
            if assignment["element_id"] != ASSIGNMENT:
                raise EngineError(E_NOT_FOUND, f"record {assignment_id} is not an assignment")
            pay = assignment["payload"]
            if pay["reviewer"] != actor:
                raise EngineError(E_NOT_ASSIGNED, "assignment belongs to another reviewer")
            phase_eid = pay["phase"]
            if pay["kind"] == SCREENING and not self._phase_open(project, phase_eid):
                raise EngineError(E_PHASE_CLOSED, "phase is closed, decisions are frozen")
            if verdict == "exclude":
                if criterion is None:
                    raise EngineError(
                        E_CRITERION_REQUIRED, "an exclusion requires a criterion"
                    )
                target = schema.by_id().get(criterion)
                if target is None or target.kind != "criterion":
                    raise EngineError(E_NOT_FOUND, f"no criterion {criterion!r}")
                if target.status != ACTIVE:
                    raise EngineError(
                        E_ELEMENT_INACTIVE, f"criterion {criterion!r} is deactivated"
                    )
            elif criterion is not None:
                raise EngineError(
                    E_CRITERION_ON_INCLUDE, "criteria only accompany exclusions"
                )
            payload = {
                "assignment_id": assignment_id,
                "reviewer": actor,
                "phase": phase_eid,
                "verdict": verdict,
                "criterion": criterion,
                "note": note,
            }
            refs = [phase_eid] + ([criterion] if criterion else [])
            existing, _ = self.store.list_records(
                project,
                DECISION,
                where=lambda r: r["payload"]["assignment_id"] == assignment_id,
            )
            if existing:
                decision = self.store.modify_record(
                    project,
                    existing[0]["id"],
                    payload,
                    existing[0]["record_version"],
                    refs=refs,
                )
            else:
                decision = self.store.add_record(
                    project,
                    DECISION,
                    payload,
                    actor,
                    paper_id=assignment["paper_id"],
                    refs=refs,
                )
            if pay["status"] != "done":
                self.store.modify_record(
                    project,
                    assignment_id,
                    {**pay, "status": "done"},
                    assignment["record_version"],
                    refs=assignment["refs"],
                )
            if pay["purpose"] == ARBITRATION:
                self._finalize_case(project, phase_eid, assignment, actor, verdict, criterion)
            else:
                self._sync_case(project, phase_eid, assignment["paper_id"], pay["kind"], actor)
            return decision

    def _finalize_case(self, project, phase_eid, assignment, actor, verdict, criterion):
        view = _View(self.store, project)
        case = view.cases.get((assignment["paper_id"], phase_eid))
        if case is None or case["payload"]["status"] != OPEN:
            return  # stale arbitration task, nothing left to settle
        if case["payload"]["escalation"] != assignment["id"]:
            return
        schema = self.store.get_schema(project)
        payload = dict(case["payload"])
        payload["status"] = RESOLVED
        payload["resolution"] = {
            "verdict": verdict,
            "resolver": actor,
            "strategy": schema.policies["conflict"]["strategy"],
            "criterion": criterion,
        }
        self.store.modify_record(
            project, case["id"], payload, case["record_version"], refs=case["refs"]
        )

    def _sync_case(self, project, phase_eid, paper_id, origin_kind, actor):
        view = _View(self.store, project)
        votes = view.vote_decisions(phase_eid, paper_id)
        distinct = {d["payload"]["verdict"] for d in votes}
        case = view.cases.get((paper_id, phase_eid))
        if len(distinct) >= 2:
            if case is None:
                self.store.add_record(
                    project,
                    CONFLICT,
                    {
                        "phase": phase_eid,
                        "status": OPEN,
                        "origin": SCREENING if origin_kind == SCREENING else VALIDATION,
                        "escalation": None,
                        "resolution": None,
                    },
                    actor,
                    paper_id=paper_id,
                    refs=[phase_eid],
                )
            elif case["payload"]["status"] != OPEN:
                payload = dict(case["payload"])
                payload.update({"status": OPEN, "resolution": None, "escalation": None})
                self.store.modify_record(
                    project, case["id"], payload, case["record_version"], refs=case["refs"]
                )
        elif case is not None and case["payload"]["status"] in (OPEN, RESOLVED):
            # Agreement after a re-decision: the recorded conflict (and any
            # earlier resolution) no longer applies.
            payload = dict(case["payload"])
            payload.update({"status": WITHDRAWN, "resolution": None, "escalation": None})
            self.store.modify_record(
                project, case["id"], payload, case["record_version"], refs=case["refs"]
            )

    def list_conflicts(self, project: str, phase: str, actor: str) -> list[dict]:
        schema = self._installed(project)
        self._require_rank(project, actor, schema=schema)
        phase_el = self._phase_by_name(schema, phase)
        view = _View(self.store, project)
        out = []
        for case in view.conflicts:
            if case["payload"]["phase"] != phase_el.id:
                continue
            votes = view.vote_decisions(phase_el.id, case["paper_id"])
            out.append(
                {
                    "case": case,
                    "verdicts": [
                        {
                            "reviewer": d["payload"]["reviewer"],
                            "verdict": d["payload"]["verdict"],
                            "criterion": d["payload"]["criterion"],
                        }
                        for d in votes
                    ],
                }
            )
        return out

    def resolve_conflicts(self, project: str, phase: str, actor: str) -> list[dict]:
        schema = self._installed(project)
        self._require_rank(project, actor, ("admin", "senior"), schema)
        phase_el = self._phase_by_name(schema, phase)
        policy = schema.policies["conflict"]
        arbiter_role = policy["arbiter_role"] or self._admin_role_name(schema)
        results: list[dict] = []
        with self.store.transaction(project):
            view = _View(self.store, project)
            open_cases = [
                c
                for c in view.conflicts
                if c["payload"]["phase"] == phase_el.id and c["payload"]["status"] == OPEN
            ]
            for case in open_cases:
                votes = view.vote_decisions(phase_el.id, case["paper_id"])
                verdicts = [d["payload"]["verdict"] for d in votes]
                ruling = resolve_verdicts(policy["strategy"], verdicts)
                payload = dict(case["payload"])
                if ruling in ("include", "exclude"):
                    criterion = None
                    if ruling == "exclude":
                        excluding = [d for d in votes if d["payload"]["verdict"] == "exclude"]
                        criterion = min(excluding, key=lambda d: d["id"])["payload"]["criterion"]
                    payload["status"] = RESOLVED
                    payload["resolution"] = {
                        "verdict": ruling,
                        "resolver": actor,
                        "strategy": policy["strategy"],
                        "criterion": criterion,
                    }
                    case = self.store.modify_record(
                        project, case["id"], payload, case["record_version"], refs=case["refs"]
                    )
                elif payload["escalation"] is None:
                    case = self._escalate(
                        project, schema, phase_el.id, case, votes, arbiter_role, actor
                    )
                results.append(case)
        return results

    def _admin_role_name(self, schema: ProjectSchema) -> str:
        for e in schema.active("role"):
            if e.descriptor["rank"] == "admin":
                return e.descriptor["name"]
        raise EngineError(E_NO_ARBITER, "no admin role declared")

    def _escalate(self, project, schema, phase_eid, case, votes, arbiter_role, actor) -> dict:
        holders = self._role_holders(project, arbiter_role)
        if not holders:
            raise EngineError(E_NO_ARBITER, f"no member holds role {arbiter_role!r}")
        participants = {d["payload"]["reviewer"] for d in votes}
        candidates = [h for h in holders if h not in participants] or holders
        view = _View(self.store, project)
        load = {
            h: len([a for a in view.assignments_for(phase_eid) if a["payload"]["reviewer"] == h])
            for h in candidates
        }
        arbiter = min(candidates, key=lambda h: (load[h], h))
        existing = [
            a
            for a in view.assignments_for(phase_eid, case["paper_id"], purpose=ARBITRATION)
            if a["payload"]["reviewer"] == arbiter
        ]
        if existing:
            task = existing[0]
            if task["payload"]["status"] != "pending":
                task = self.store.modify_record(
                    project,
                    task["id"],
                    {**task["payload"], "status": "pending"},
                    task["record_version"],
                    refs=task["refs"],
                )
        else:
            task = self.store.add_record(
                project,
                ASSIGNMENT,
                {
                    "reviewer": arbiter,
                    "phase": phase_eid,
                    "kind": VALIDATION,
                    "status": "pending",
                    "purpose": ARBITRATION,
                },
                actor,
                paper_id=case["paper_id"],
                refs=[phase_eid],
            )
        payload = dict(case["payload"])
        payload["escalation"] = task["id"]
        return self.store.modify_record(
            project, case["id"], payload, case["record_version"], refs=case["refs"]
        )

    # ------------------------------------------------------------------
    # Validation sampling

    def sample_validation(self, project: str, phase: str, actor: str, seed: int | None = None) -> list[dict]:
        schema = self._installed(project)
        self._require_rank(project, actor, ("admin", "senior"), schema)
        policy = schema.policies.get("validation")
        if not policy:
            raise EngineError(E_NO_POLICY, "no validation policy configured")
        phase_el = self._phase_by_name(schema, phase)
        if seed is None:
            seed = secrets.randbits(63)
        created: list[dict] = []
        with self.store.transaction(project):
            view = _View(self.store, project)
            population = []
            for pid in self._population(view, self._phases(schema), phase_el.id):
                outcome = view.outcome(phase_el.id, pid)
                if outcome == "pending":
                    continue
                if policy["target"] == "included" and outcome != "included":
                    continue
                if policy["target"] == "excluded" and outcome != "excluded":
                    continue
                if view.assignments_for(phase_el.id, pid, kind=VALIDATION):
                    continue  # already validated (or under arbitration)
                population.append(pid)
            count = validation_share(policy["percentage"], len(population))
            rng = SplitMix64(seed)
            sampled = rng.sample(sorted(population), count)
            holders = self._role_holders(project, policy["validator_role"])
            load = {h: 0 for h in holders}
            for a in view.assignments:
                if a["payload"]["reviewer"] in load and a["payload"]["kind"] == VALIDATION:
                    load[a["payload"]["reviewer"]] += 1
            for pid in sampled:
                screeners = {
                    a["payload"]["reviewer"]
                    for a in view.assignments_for(phase_el.id, pid, kind=SCREENING)
                }
                candidates = [h for h in holders if h not in screeners]
                if not candidates:
                    raise EngineError(
                        E_NO_VALIDATOR,
                        f"paper {pid}: every {policy['validator_role']!r} holder screened it",
                    )
                validator = min(candidates, key=lambda h: (load[h], h))
                load[validator] += 1
                created.append(
                    self.store.add_record(
                        project,
                        ASSIGNMENT,
                        {
                            "reviewer": validator,
                            "phase": phase_el.id,
                            "kind": VALIDATION,
                            "status": "pending",
                            "purpose": VALIDATION,
                        },
                        actor,
                        paper_id=pid,
                        refs=[phase_el.id],
                    )
                )
            self.store.add_record(
                project,
                AUDIT,
                {
                    "event": "sample_validation",
                    "data": {"phase": phase, "seed": seed, "sampled": sampled},
                },
                actor,
            )
        return created

    # ------------------------------------------------------------------
    # Classification

    def submit_classification(
        self,
        project: str,
        paper_id: int,
        actor: str,
        values: dict,
        mark_complete: bool = False,
        expected_version: int | None = None,
    ) -> dict:
        schema = self._installed(project)
        rank = self._require_rank(project, actor, schema=schema)
        with self.store.transaction(project):
            paper = self.store.get_record(project, paper_id)
            if paper["element_id"] != PAPER_ELEMENT:
                raise EngineError(E_NOT_FOUND, f"record {paper_id} is not a paper")
            view = _View(self.store, project)
            phases = self._phases(schema)
            final = phases[-1]
            if view.outcome(final.id, paper_id) != "included":
                raise EngineError(
                    E_FORBIDDEN,
                    "classification opens once the paper is included in the final phase",
                )
            if rank != "admin":
                mine = [
                    a
                    for a in view.assignments
                    if a["paper_id"] == paper_id and a["payload"]["reviewer"] == actor
                ]
                if not mine:
                    raise EngineError(
                        E_FORBIDDEN, "only assigned reviewers or admins classify a paper"
                    )
            form = FormDescriptor.from_dict(self.store.get_form(project))
            inactive = {
                e.id
                for e in schema.elements
                if e.kind == "category" and e.status != ACTIVE
            }
            violations = validate_values(form, values, mark_complete, inactive)
            if violations:
                raise ClassificationError(violations)
            refs = value_refs(form, values)
            payload = {
                "values": values,
                "completeness": "complete" if mark_complete else "draft",
            }
            existing, _ = self.store.list_records(
                project, CLASSIFICATION, paper_id=paper_id
            )
            if existing:
                rec = existing[0]
                version = expected_version if expected_version is not None else rec["record_version"]
                return self.store.modify_record(project, rec["id"], payload, version, refs=refs)
            return self.store.add_record(
                project, CLASSIFICATION, payload, actor, paper_id=paper_id, refs=refs
            )

    def get_classification(self, project: str, paper_id: int, actor: str) -> dict | None:
        schema = self._installed(project)
        self._require_rank(project, actor, schema=schema)
        self.store.get_record(project, paper_id)
        existing, _ = self.store.list_records(project, CLASSIFICATION, paper_id=paper_id)
        return existing[0] if existing else None

    def add_dynamic_choice(self, project: str, category: str, value: str, actor: str) -> list[dict]:
        schema = self._installed(project)
        self._require_rank(project, actor, schema=schema)
        target = schema.by_id().get(category)
        if target is None or target.kind != "category" or target.status != ACTIVE:
            target = schema.active_by_natural().get(category)
        if target is None or target.kind != "category":
            target = schema.find_active_category(category.removeprefix("category."))
        if target is None:
            raise EngineError(E_NOT_FOUND, f"no active category {category!r}")
        if target.descriptor["category_kind"] != "dynamiclist":
            raise EngineError(E_NOT_DYNAMIC, f"{target.descriptor['name']!r} has a fixed choice set")
        if not isinstance(value, str) or not value.strip():
            raise EngineError(E_CONSTRAINT, "choice value must be non-empty")
        value = value.strip()
        with self.store.transaction(project):
            schema = self.store.get_schema(project)
            active_values = {
                e.descriptor["value"].lower()
                for e in schema.active("choice")
                if e.descriptor["category"] == target.id
            }
            if value.lower() in active_values:
                raise EngineError(E_DUPLICATE_CHOICE, f"{value!r} already exists")
            cid = choice_id(target.id, value)
            existing = schema.by_id().get(cid)
            descriptor = choice_descriptor(target.id, value, origin="user")
            if existing is not None and existing.status == ACTIVE:
                raise EngineError(E_DUPLICATE_CHOICE, f"{value!r} collides with an existing choice")
            if existing is not None:
                if existing.descriptor == descriptor:
                    op = MigrationOp(REACTIVATE, cid, "choice")
                else:
                    raise EngineError(
                        E_DUPLICATE_CHOICE,
                        f"{value!r} collides with a retired choice identifier",
                    )
            else:
                op = MigrationOp(ADD, cid, "choice", descriptor=descriptor)
            plan = MigrationPlan(base_version=schema.version, ops=[op])
            schema = apply_plan(self.store, project, plan, schema.policies)
        return [
            {"id": e.id, "value": e.descriptor["value"]}
            for e in schema.active("choice")
            if e.descriptor["category"] == target.id
        ]

    # ------------------------------------------------------------------
    # Statistics

    def stats(self, project: str) -> list[PhaseStats]:
        schema = self._installed(project)
        view = _View(self.store, project)
        classifications, _ = self.store.list_records(project, CLASSIFICATION)
        by_paper = {c["paper_id"]: c for c in classifications}
        population = sorted(p["id"] for p in view.papers)
        out: list[PhaseStats] = []
        for phase_el in self._phases(schema):
            s = PhaseStats(phase=phase_el.descriptor["name"], phase_element=phase_el.id)
            s.total = len(population)
            included: list[int] = []
            for pid in population:
                screening = view.assignments_for(phase_el.id, pid, kind=SCREENING)
                if screening:
                    s.assigned += 1
                    if all(a["payload"]["status"] == "done" for a in screening):
                        s.decided += 1
                outcome = view.outcome(phase_el.id, pid)
                if outcome == "included":
                    s.included += 1
                    included.append(pid)
                elif outcome == "excluded":
                    s.excluded += 1
                    crit = self._winning_criterion(view, phase_el.id, pid)
                    if crit is not None:
                        s.per_criterion[crit] = s.per_criterion.get(crit, 0) + 1
            s.pending = s.total - s.included - s.excluded
            s.conflicts = sum(
                1
                for c in view.conflicts
                if c["payload"]["phase"] == phase_el.id and c["payload"]["status"] == OPEN
            )
            for pid in population:
                record = by_paper.get(pid)
                if record is None:
                    continue
                for cat_eid, vals in record["payload"]["values"].items():
                    if not isinstance(vals, list):
                        continue
                    for v in vals:
                        dist = s.distributions.setdefault(cat_eid, {})
                        dist[str(v)] = dist.get(str(v), 0) + 1
            out.append(s)
            population = included
        return out

    def _winning_criterion(self, view: _View, phase_eid: str, paper_id) -> str | None:
        case = view.cases.get((paper_id, phase_eid))
        if case is not None and case["payload"]["status"] == RESOLVED:
            return case["payload"]["resolution"]["criterion"]
        excluding = [
            d
            for d in view.vote_decisions(phase_eid, paper_id)
            if d["payload"]["verdict"] == "exclude"
        ]
        if not excluding:
            return None
        return min(excluding, key=lambda d: d["id"])["payload"]["criterion"]

    def export_stats(self, project: str, format: str):
        stats = self.stats(project)
        if format == "json":
            return stats_to_json(stats)
        if format == "csv":
            return stats_to_csv(stats)
        raise EngineError(E_FORMAT, f"unknown export format {format!r}")
