"""End-to-end workflow behavior: assignment, screening, conflict
handling, validation sampling, classification, and statistics."""

from __future__ import annotations

import pytest

import oracles
from conftest import SAMPLE, corpus_csv, install_source, make_bench
from srkit.engine import (
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
from srkit.install import DEACTIVATE, MigrationOp, MigrationPlan, apply_plan
from srkit.store import E_ELEMENT_INACTIVE, E_VERSION_STALE, StoreError

NPR = "criterion.not_peer_reviewed"
OFF = "criterion.off_topic"
NMR = "criterion.no_measurements_reported"
TRIAGE = "phase.triage"
FULLTEXT = "phase.fulltext_pass"
TEAM = ["root", "vera", "ana", "ben", "cam"]


class fails:
    """Context manager asserting an EngineError with a specific code."""

    def __init__(self, code):
        self.code = code

    def __enter__(self):
        self._ctx = pytest.raises(EngineError)
        self._info = self._ctx.__enter__()
        return self._info

    def __exit__(self, *exc):
        handled = self._ctx.__exit__(*exc)
        if handled:
            got = self._info.value.code
            assert got == self.code, f"expected {self.code}, got {got}"
        return handled


def load_papers(bench, n, start=1):
    report = bench.engine.import_papers(
        bench.project, corpus_csv(n, start), "csv", bench.admin
    )
    assert report["imported"] == n
    rows, _ = bench.engine.list_papers(bench.project)
    return [p["id"] for p in rows]


def assign(bench, pid, reviewer, phase=None):
    return bench.engine.manual_assign(
        bench.project, phase or bench.phase, pid, reviewer, bench.admin
    )


def screen(bench, pid, reviewer, verdict, criterion=None, phase=None):
    task = assign(bench, pid, reviewer, phase)
    bench.engine.submit_decision(bench.project, task["id"], reviewer, verdict, criterion)
    return task


def include_fully(bench, pid):
    for phase in (bench.phase, bench.phase2):
        screen(bench, pid, "ana", "include", phase=phase)
        screen(bench, pid, "ben", "include", phase=phase)


def variant(bench, name, *edits):
    """Install a renamed copy of the demo model with textual edits."""
    source = SAMPLE.replace("project ergo", f"project {name}")
    for old, new in edits:
        assert old in source, f"edit target {old!r} missing"
        source = source.replace(old, new)
    install_source(bench.store, source, creator="root")
    return name


# --- automatic assignment -------------------------------------------------


def test_auto_assign_covers_the_population_twice_over(bench):
    pids = load_papers(bench, 10)
    created = bench.engine.auto_assign(bench.project, bench.phase, bench.admin, seed=11)
    assert len(created) == 20
    pairs = [(a["paper_id"], a["payload"]["reviewer"]) for a in created]
    assert oracles.assignment_problems(pids, TEAM, 2, pairs) == []
    for task in created:
        assert task["payload"]["phase"] == TRIAGE
        assert task["payload"]["kind"] == "screening"
        assert task["payload"]["purpose"] == "screening"
        assert task["payload"]["status"] == "pending"
        assert task["refs"] == [TRIAGE]


def test_auto_assign_writes_an_audit_trail(bench):
    load_papers(bench, 4)
    bench.engine.auto_assign(bench.project, bench.phase, bench.admin, seed=77)
    rows, _ = bench.store.list_records(bench.project, "entity.audit")
    assert len(rows) == 1
    assert rows[0]["payload"] == {
        "event": "auto_assign",
        "data": {"phase": "triage", "seed": 77, "count": 8},
    }


def test_auto_assign_tops_up_without_reassigning(bench):
    first = load_papers(bench, 10)
    batch1 = bench.engine.auto_assign(bench.project, bench.phase, bench.admin, seed=1)
    both = load_papers(bench, 3, start=11)
    fresh = sorted(set(both) - set(first))
    batch2 = bench.engine.auto_assign(bench.project, bench.phase, bench.admin, seed=2)
    assert sorted({a["paper_id"] for a in batch2}) == fresh
    assert len(batch2) == 6
    pairs = [
        (a["paper_id"], a["payload"]["reviewer"]) for a in batch1 + batch2
    ]
    assert oracles.spread_of(TEAM, pairs) <= 1
    # Nothing left to hand out on a third pass.
    assert bench.engine.auto_assign(bench.project, bench.phase, bench.admin, seed=3) == []


def test_auto_assign_is_deterministic_per_seed():
    def run(seed):
        b = make_bench()
        load_papers(b, 10)
        created = b.engine.auto_assign(b.project, b.phase, b.admin, seed=seed)
        return sorted((a["paper_id"], a["payload"]["reviewer"]) for a in created)

    assert run(42) == run(42)
    assert run(42) != run(43)


def test_auto_assign_is_admin_only(bench):
    load_papers(bench, 2)
    with fails(E_FORBIDDEN):
        bench.engine.auto_assign(bench.project, bench.phase, "ana")
    with fails(E_FORBIDDEN):
        bench.engine.auto_assign(bench.project, bench.phase, bench.senior)


def test_auto_assign_honours_manual_mode(bench):
    name = variant(bench, "handpick", ("mode automatic", "mode manual"))
    with fails(E_MANUAL_MODE):
        bench.engine.auto_assign(name, "triage", "root")


def test_auto_assign_needs_enough_members(bench):
    name = variant(bench, "crowded", ("reviewers 2", "reviewers 7"))
    with fails(E_TOO_FEW_REVIEWERS):
        bench.engine.auto_assign(name, "triage", "root")


def test_auto_assign_rejects_a_closed_phase(bench):
    load_papers(bench, 2)
    bench.engine.set_phase_state(bench.project, bench.phase, bench.admin, "closed")
    with fails(E_PHASE_CLOSED):
        bench.engine.auto_assign(bench.project, bench.phase, bench.admin, seed=1)
    bench.engine.set_phase_state(bench.project, bench.phase, bench.admin, "open")
    assert bench.engine.auto_assign(bench.project, bench.phase, bench.admin, seed=1)


def test_second_phase_pool_is_the_included_set(bench):
    load_papers(bench, 4)
    screen(bench, 1, "ana", "include")
    screen(bench, 1, "ben", "include")
    screen(bench, 2, "ana", "exclude", OFF)
    screen(bench, 2, "ben", "exclude", OFF)
    screen(bench, 3, "ana", "include")
    screen(bench, 3, "ben", "exclude", NPR)  # conflict: still pending
    assign(bench, 4, "ana")  # undecided
    created = bench.engine.auto_assign(bench.project, bench.phase2, bench.admin, seed=9)
    assert {a["paper_id"] for a in created} == {1}
    assert len(created) == 2


def test_manual_assignment_rules(bench):
    load_papers(bench, 2)
    task = bench.engine.manual_assign(bench.project, bench.phase, 1, "cam", bench.senior)
    assert task["payload"]["reviewer"] == "cam"
    with fails(E_DUPLICATE):
        assign(bench, 1, "cam")
    bench.store.create_user("zoe", "pw-zoe")
    with fails(E_FORBIDDEN):
        assign(bench, 1, "zoe")  # not a member
    with fails(E_FORBIDDEN):
        bench.engine.manual_assign(bench.project, bench.phase, 1, "ana", "cam")
    with fails(E_NOT_FOUND):
        assign(bench, task["id"], "ana")  # an assignment, not a paper
    with fails(E_NOT_FOUND):
        bench.engine.manual_assign(bench.project, "snowball", 1, "ana", bench.admin)
    bench.engine.set_phase_state(bench.project, bench.phase, bench.admin, "closed")
    with fails(E_PHASE_CLOSED):
        assign(bench, 2, "ana")


# --- the reviewer queue ---------------------------------------------------


def test_queue_shows_pending_work_with_papers(bench):
    load_papers(bench, 3)
    a1 = assign(bench, 1, "ana")
    assign(bench, 2, "ana")
    assign(bench, 1, "ben")
    mine = bench.engine.queue(bench.project, "ana")
    assert [e["assignment"]["paper_id"] for e in mine] == [1, 2]
    assert all(e["phase"] == "triage" for e in mine)
    assert mine[0]["paper"]["payload"]["title"] == "Paper number 1"
    bench.engine.submit_decision(bench.project, a1["id"], "ana", "include")
    assert [e["assignment"]["paper_id"] for e in bench.engine.queue(bench.project, "ana")] == [2]
    assert len(bench.engine.queue(bench.project, "ben")) == 1
    assert bench.engine.queue(bench.project, "cam") == []
    assert bench.engine.queue(bench.project, "ana", phase=bench.phase2) == []
    with fails(E_NOT_FOUND):
        bench.engine.queue(bench.project, "ana", phase="snowball")
    with fails(E_FORBIDDEN):
        bench.engine.queue(bench.project, "nobody")


# --- screening decisions --------------------------------------------------


def test_decisions_validate_verdict_and_criterion(bench):
    load_papers(bench, 1)
    task = assign(bench, 1, "ana")
    decide = bench.engine.submit_decision
    with fails(E_CONSTRAINT):
        decide(bench.project, task["id"], "ana", "maybe")
    with fails(E_CRITERION_REQUIRED):
        decide(bench.project, task["id"], "ana", "exclude")
    with fails(E_NOT_FOUND):
        decide(bench.project, task["id"], "ana", "exclude", "criterion.nonsense")
    with fails(E_NOT_FOUND):
        decide(bench.project, task["id"], "ana", "exclude", "category.method")
    with fails(E_CRITERION_ON_INCLUDE):
        decide(bench.project, task["id"], "ana", "include", NPR)
    decision = decide(bench.project, task["id"], "ana", "include")
    assert decision["payload"] == {
        "assignment_id": task["id"],
        "reviewer": "ana",
        "phase": TRIAGE,
        "verdict": "include",
        "criterion": None,
        "note": None,
    }
    assert bench.store.get_record(bench.project, task["id"])["payload"]["status"] == "done"


def test_deactivated_criterion_is_not_citable(bench):
    load_papers(bench, 1)
    task = assign(bench, 1, "ana")
    bench.store.set_element_status(bench.project, OFF, "deactivated")
    with fails(E_ELEMENT_INACTIVE):
        bench.engine.submit_decision(bench.project, task["id"], "ana", "exclude", OFF)
    decision = bench.engine.submit_decision(bench.project, task["id"], "ana", "exclude", NPR)
    assert decision["payload"]["criterion"] == NPR


def test_decision_requires_ownership(bench):
    load_papers(bench, 1)
    task = assign(bench, 1, "ana")
    with fails(E_NOT_ASSIGNED):
        bench.engine.submit_decision(bench.project, task["id"], "ben", "include")
    with fails(E_NOT_ASSIGNED):
        bench.engine.submit_decision(bench.project, task["id"], bench.admin, "include")
    with fails(E_NOT_FOUND):
        bench.engine.submit_decision(bench.project, 1, "ana", "include")  # a paper


def test_revision_updates_the_same_decision_record(bench):
    load_papers(bench, 1)
    task = assign(bench, 1, "ana")
    first = bench.engine.submit_decision(bench.project, task["id"], "ana", "include")
    second = bench.engine.submit_decision(
        bench.project, task["id"], "ana", "exclude", NPR, note="venue is a blog"
    )
    assert second["id"] == first["id"]
    assert second["record_version"] == 2
    assert second["payload"]["verdict"] == "exclude"
    assert second["payload"]["note"] == "venue is a blog"
    assert NPR in second["refs"]
    rows, total = bench.store.list_records(bench.project, "entity.decision")
    assert total == 1


def test_closing_a_phase_freezes_screening_decisions(bench):
    load_papers(bench, 2)
    open_task = assign(bench, 1, "ana")
    decided = screen(bench, 2, "ana", "include")
    bench.engine.set_phase_state(bench.project, bench.phase, bench.admin, "closed")
    with fails(E_PHASE_CLOSED):
        bench.engine.submit_decision(bench.project, open_task["id"], "ana", "include")
    with fails(E_PHASE_CLOSED):  # revision is frozen too
        bench.engine.submit_decision(bench.project, decided["id"], "ana", "exclude", OFF)
    bench.engine.set_phase_state(bench.project, bench.phase, bench.admin, "open")
    assert bench.engine.submit_decision(bench.project, open_task["id"], "ana", "include")


# --- conflicts ------------------------------------------------------------


def test_split_votes_open_a_case_and_agreement_withdraws_it(bench):
    load_papers(bench, 1)
    screen(bench, 1, "ana", "include")
    ben = screen(bench, 1, "ben", "exclude", OFF)
    found = bench.engine.list_conflicts(bench.project, bench.phase, "cam")
    assert len(found) == 1
    case = found[0]["case"]
    assert case["payload"]["status"] == "open"
    assert case["payload"]["origin"] == "screening"
    assert case["payload"]["phase"] == TRIAGE
    assert sorted(
        (v["reviewer"], v["verdict"], v["criterion"]) for v in found[0]["verdicts"]
    ) == [("ana", "include", None), ("ben", "exclude", OFF)]

    bench.engine.submit_decision(bench.project, ben["id"], "ben", "include")
    after = bench.engine.list_conflicts(bench.project, bench.phase, "cam")
    assert after[0]["case"]["id"] == case["id"]  # same record, flipped status
    assert after[0]["case"]["payload"]["status"] == "withdrawn"
    assert bench.engine.stats(bench.project)[0].included == 1

    bench.engine.submit_decision(bench.project, ben["id"], "ben", "exclude", NPR)
    reopened = bench.engine.list_conflicts(bench.project, bench.phase, "cam")[0]["case"]
    assert reopened["id"] == case["id"]
    assert reopened["payload"]["status"] == "open"
    assert reopened["payload"]["escalation"] is None


def test_majority_resolution_keeps_the_earliest_criterion(bench):
    load_papers(bench, 1)
    screen(bench, 1, "ana", "include")
    screen(bench, 1, "ben", "exclude", OFF)
    screen(bench, 1, "cam", "exclude", NPR)
    results = bench.engine.resolve_conflicts(bench.project, bench.phase, bench.admin)
    assert len(results) == 1
    assert results[0]["payload"]["status"] == "resolved"
    assert results[0]["payload"]["resolution"] == {
        "verdict": "exclude",
        "resolver": "root",
        "strategy": "majority",
        "criterion": OFF,  # ben voted before cam
    }
    stats = bench.engine.stats(bench.project)[0]
    assert stats.excluded == 1
    assert stats.per_criterion == {OFF: 1}
    assert stats.conflicts == 0


def test_resolving_requires_senior_rank(bench):
    load_papers(bench, 1)
    screen(bench, 1, "ana", "include")
    screen(bench, 1, "ben", "exclude", OFF)
    with fails(E_FORBIDDEN):
        bench.engine.resolve_conflicts(bench.project, bench.phase, "cam")
    assert bench.engine.resolve_conflicts(bench.project, bench.phase, bench.senior)


def test_tied_votes_escalate_to_an_uninvolved_arbiter(bench):
    load_papers(bench, 1)
    screen(bench, 1, "ana", "include")
    screen(bench, 1, "ben", "exclude", OFF)
    case = bench.engine.resolve_conflicts(bench.project, bench.phase, bench.senior)[0]
    task_id = case["payload"]["escalation"]
    assert case["payload"]["status"] == "open"
    assert task_id is not None
    task = bench.store.get_record(bench.project, task_id)
    assert task["payload"] == {
        "reviewer": "vera",
        "phase": TRIAGE,
        "kind": "validation",
        "status": "pending",
        "purpose": "arbitration",
    }
    assert task["paper_id"] == 1

    # A second sweep must not spawn another arbitration task.
    again = bench.engine.resolve_conflicts(bench.project, bench.phase, bench.senior)[0]
    assert again["payload"]["escalation"] == task_id
    _, total = bench.store.list_records(bench.project, "entity.assignment")
    assert total == 3

    bench.engine.submit_decision(bench.project, task_id, "vera", "exclude", NPR)
    settled = bench.engine.list_conflicts(bench.project, bench.phase, "ana")[0]["case"]
    assert settled["payload"]["status"] == "resolved"
    assert settled["payload"]["resolution"] == {
        "verdict": "exclude",
        "resolver": "vera",
        "strategy": "majority",
        "criterion": NPR,
    }
    stats = bench.engine.stats(bench.project)[0]
    assert stats.excluded == 1
    assert stats.per_criterion == {NPR: 1}  # the ruling beats the earliest vote


def test_arbitration_outlives_a_phase_close(bench):
    load_papers(bench, 1)
    screen(bench, 1, "ana", "include")
    screen(bench, 1, "ben", "exclude", OFF)
    case = bench.engine.resolve_conflicts(bench.project, bench.phase, bench.admin)[0]
    bench.engine.set_phase_state(bench.project, bench.phase, bench.admin, "closed")
    task_id = case["payload"]["escalation"]
    bench.engine.submit_decision(bench.project, task_id, "vera", "include")
    settled = bench.engine.list_conflicts(bench.project, bench.phase, "ana")[0]["case"]
    assert settled["payload"]["resolution"]["verdict"] == "include"
    assert bench.engine.stats(bench.project)[0].included == 1


def test_reopened_case_reuses_the_arbitration_task(bench):
    load_papers(bench, 1)
    screen(bench, 1, "ana", "include")
    ben = screen(bench, 1, "ben", "exclude", OFF)
    case = bench.engine.resolve_conflicts(bench.project, bench.phase, bench.admin)[0]
    task_id = case["payload"]["escalation"]
    ruling = bench.engine.submit_decision(bench.project, task_id, "vera", "exclude", NPR)

    # Agreement after the ruling withdraws the case entirely.
    bench.engine.submit_decision(bench.project, ben["id"], "ben", "include")
    case = bench.engine.list_conflicts(bench.project, bench.phase, "ana")[0]["case"]
    assert case["payload"]["status"] == "withdrawn"
    assert case["payload"]["resolution"] is None

    # A renewed split escalates again onto the same task and decision.
    bench.engine.submit_decision(bench.project, ben["id"], "ben", "exclude", NPR)
    case = bench.engine.resolve_conflicts(bench.project, bench.phase, bench.admin)[0]
    assert case["payload"]["escalation"] == task_id
    task = bench.store.get_record(bench.project, task_id)
    assert task["payload"]["status"] == "pending"
    _, assignments = bench.store.list_records(bench.project, "entity.assignment")
    assert assignments == 3
    second_ruling = bench.engine.submit_decision(
        bench.project, task_id, "vera", "include"
    )
    assert second_ruling["id"] == ruling["id"]
    case = bench.engine.list_conflicts(bench.project, bench.phase, "ana")[0]["case"]
    assert case["payload"]["resolution"]["verdict"] == "include"


def test_unanimity_escalates_even_a_strong_majority(bench):
    name = variant(bench, "unan", ("strategy majority", "strategy unanimity"))
    for login, role in [("vera", "vetter"), ("ana", "reader"), ("ben", "reader"), ("cam", "reader")]:
        bench.store.add_member(name, login, role)
    bench.engine.import_papers(name, corpus_csv(1), "csv", "root")
    for who, verdict, crit in [("ana", "exclude", OFF), ("ben", "exclude", OFF), ("cam", "include", None)]:
        task = bench.engine.manual_assign(name, "triage", 1, who, "root")
        bench.engine.submit_decision(name, task["id"], who, verdict, crit)
    case = bench.engine.resolve_conflicts(name, "triage", "root")[0]
    assert case["payload"]["status"] == "open"
    task = bench.store.get_record(name, case["payload"]["escalation"])
    assert task["payload"]["reviewer"] == "vera"
    assert task["payload"]["purpose"] == "arbitration"


def test_escalation_without_an_arbiter_fails_loudly(bench):
    name = variant(bench, "noarb")
    bench.store.add_member(name, "ana", "reader")
    bench.store.add_member(name, "ben", "reader")
    bench.engine.import_papers(name, corpus_csv(1), "csv", "root")
    for who, verdict, crit in [("ana", "include", None), ("ben", "exclude", OFF)]:
        task = bench.engine.manual_assign(name, "triage", 1, who, "root")
        bench.engine.submit_decision(name, task["id"], who, verdict, crit)
    with fails(E_NO_ARBITER):
        bench.engine.resolve_conflicts(name, "triage", "root")


def test_arbiter_falls_back_to_a_participant_when_unavoidable(bench):
    load_papers(bench, 1)
    screen(bench, 1, "vera", "include")
    screen(bench, 1, "ana", "exclude", NPR)
    case = bench.engine.resolve_conflicts(bench.project, bench.phase, bench.admin)[0]
    task = bench.store.get_record(bench.project, case["payload"]["escalation"])
    assert task["payload"]["reviewer"] == "vera"  # sole holder, despite voting


# --- validation sampling --------------------------------------------------


def exclude_all(bench, pids):
    for pid in pids:
        screen(bench, pid, "ana", "exclude", OFF)
        screen(bench, pid, "ben", "exclude", OFF)


def test_sampling_takes_a_ceil_share_of_settled_papers(bench):
    pids = load_papers(bench, 10)
    exclude_all(bench, pids)
    created = bench.engine.sample_validation(bench.project, bench.phase, bench.admin, seed=3)
    assert len(created) == oracles.sample_size(20, 10) == 2
    for task in created:
        assert task["payload"] == {
            "reviewer": "vera",
            "phase": TRIAGE,
            "kind": "validation",
            "status": "pending",
            "purpose": "validation",
        }
    sampled = {t["paper_id"] for t in created}
    assert sampled <= set(pids)
    audits, _ = bench.store.list_records(bench.project, "entity.audit")
    assert audits[-1]["payload"]["event"] == "sample_validation"
    assert sorted(audits[-1]["payload"]["data"]["sampled"]) == sorted(sampled)
    assert audits[-1]["payload"]["data"]["seed"] == 3


def test_sampling_is_deterministic_per_seed():
    def run(seed):
        b = make_bench()
        exclude_all(b, load_papers(b, 10))
        out = b.engine.sample_validation(b.project, b.phase, b.admin, seed=seed)
        return sorted(t["paper_id"] for t in out)

    assert run(5) == run(5)
    assert run(5) != run(6)


def test_resampling_drains_the_pool_without_repeats(bench):
    pids = load_papers(bench, 10)
    exclude_all(bench, pids)
    rounds = []
    for i in range(9):
        created = bench.engine.sample_validation(
            bench.project, bench.phase, bench.admin, seed=100 + i
        )
        rounds.append([t["paper_id"] for t in created])
    # ceil(20% of what is left) each time: 10, 8, 6, 4, 3, 2, 1, 0 papers.
    assert [len(r) for r in rounds] == [2, 2, 2, 1, 1, 1, 1, 0, 0]
    flat = [pid for r in rounds for pid in r]
    assert sorted(flat) == pids


def test_sampling_follows_the_policy_target(bench):
    load_papers(bench, 10)
    for pid in (1, 2, 3):  # included
        screen(bench, pid, "ana", "include")
        screen(bench, pid, "ben", "include")
    exclude_all(bench, [4, 5])
    screen(bench, 6, "ana", "include")
    screen(bench, 6, "ben", "exclude", OFF)  # conflict: pending
    assign(bench, 7, "ana")  # undecided

    excluded_pick = bench.engine.sample_validation(bench.project, bench.phase, bench.admin, seed=1)
    assert len(excluded_pick) == 1  # ceil(20% of 2)
    assert excluded_pick[0]["paper_id"] in {4, 5}

    install_source(bench.store, SAMPLE.replace("target excluded", "target included"))
    included_pick = bench.engine.sample_validation(bench.project, bench.phase, bench.admin, seed=1)
    assert len(included_pick) == 1  # ceil(20% of 3)
    assert included_pick[0]["paper_id"] in {1, 2, 3}

    install_source(bench.store, SAMPLE.replace("target excluded", "target all"))
    third = bench.engine.sample_validation(bench.project, bench.phase, bench.admin, seed=1)
    assert len(third) == 1  # ceil(20% of the 3 not yet validated)
    assert third[0]["paper_id"] in {1, 2, 3, 4, 5}


def test_validators_never_audit_their_own_screening(bench):
    bench.store.create_user("uma", "pw-uma")
    bench.store.add_member(bench.project, "uma", "vetter")
    load_papers(bench, 4)
    for pid in (1, 2):
        screen(bench, pid, "vera", "exclude", OFF)
        screen(bench, pid, "ana", "exclude", OFF)
    exclude_all(bench, [3, 4])
    install_source(bench.store, SAMPLE.replace("percent 20", "percent 100"))
    created = bench.engine.sample_validation(bench.project, bench.phase, bench.admin, seed=8)
    who = {t["paper_id"]: t["payload"]["reviewer"] for t in created}
    assert who == {1: "uma", 2: "uma", 3: "vera", 4: "vera"}


def test_sampling_fails_when_every_validator_screened_the_paper(bench):
    load_papers(bench, 1)
    screen(bench, 1, "vera", "exclude", OFF)
    screen(bench, 1, "ana", "exclude", OFF)
    with fails(E_NO_VALIDATOR):
        bench.engine.sample_validation(bench.project, bench.phase, bench.admin, seed=1)


def test_sampling_needs_a_validation_policy(bench):
    name = variant(
        bench,
        "noval",
        ("  validation { percent 20 target excluded validator vetter }\n", ""),
    )
    with fails(E_NO_POLICY):
        bench.engine.sample_validation(name, "triage", "root")


def test_sampling_requires_senior_rank(bench):
    load_papers(bench, 1)
    with fails(E_FORBIDDEN):
        bench.engine.sample_validation(bench.project, bench.phase, "ana")


def test_validator_disagreement_opens_a_validation_case(bench):
    load_papers(bench, 1)
    exclude_all(bench, [1])
    task = bench.engine.sample_validation(bench.project, bench.phase, bench.admin, seed=2)[0]
    bench.engine.submit_decision(bench.project, task["id"], "vera", "include")
    found = bench.engine.list_conflicts(bench.project, bench.phase, "ana")
    assert len(found) == 1
    assert found[0]["case"]["payload"]["origin"] == "validation"
    assert found[0]["case"]["payload"]["status"] == "open"
    assert len(found[0]["verdicts"]) == 3  # the validator votes too
    case = bench.engine.resolve_conflicts(bench.project, bench.phase, bench.admin)[0]
    assert case["payload"]["resolution"] == {
        "verdict": "exclude",  # two screeners against one validator
        "resolver": "root",
        "strategy": "majority",
        "criterion": OFF,
    }


# --- classification -------------------------------------------------------


def test_classification_opens_after_final_inclusion(bench):
    load_papers(bench, 1)
    values = {"category.effort": [12.5]}
    screen(bench, 1, "ana", "include")
    screen(bench, 1, "ben", "include")
    with fails(E_FORBIDDEN):  # included in triage, still pending in fulltext
        bench.engine.submit_classification(bench.project, 1, bench.admin, values)
    screen(bench, 1, "ana", "include", phase=bench.phase2)
    screen(bench, 1, "ben", "include", phase=bench.phase2)
    record = bench.engine.submit_classification(bench.project, 1, bench.admin, values)
    assert record["payload"] == {"values": values, "completeness": "draft"}

    with fails(E_FORBIDDEN):  # cam never touched this paper
        bench.engine.submit_classification(bench.project, 1, "cam", values)
    revised = bench.engine.submit_classification(
        bench.project, 1, "ana", {"category.effort": [14.0]}, mark_complete=True
    )
    assert revised["id"] == record["id"]
    assert revised["record_version"] == 2
    assert revised["payload"]["completeness"] == "complete"
    assert bench.engine.get_classification(bench.project, 1, "cam")["id"] == record["id"]


def test_classification_violations_reject_the_submission(bench):
    load_papers(bench, 1)
    include_fully(bench, 1)
    with pytest.raises(ClassificationError) as info:
        bench.engine.submit_classification(
            bench.project, 1, bench.admin, {"category.effort": [9999]}
        )
    assert info.value.code == E_CONSTRAINT
    assert [(v["element"], v["rule"]) for v in info.value.violations] == [
        ("category.effort", "range")
    ]
    assert bench.engine.get_classification(bench.project, 1, "ana") is None


def test_classification_checks_choices_and_dependencies(bench):
    load_papers(bench, 1)
    include_fully(bench, 1)
    bad = {"category.method": ["experiment"], "category.granularity": ["system"]}
    with pytest.raises(ClassificationError) as info:
        bench.engine.submit_classification(bench.project, 1, bench.admin, bad)
    assert info.value.violations[0]["rule"] == "dependency"
    good = {
        "category.effort": [10.0],
        "category.method": ["experiment"],
        "category.tool": ["rapl"],
        "category.granularity": ["function"],
    }
    record = bench.engine.submit_classification(bench.project, 1, bench.admin, good)
    assert record["refs"] == [
        "category.effort",
        "category.method",
        "category.method.choice.experiment",
        "category.tool",
        "category.tool.choice.rapl",
        "category.granularity",
        "category.granularity.choice.function",
    ]


def test_classification_honours_optimistic_versioning(bench):
    load_papers(bench, 1)
    include_fully(bench, 1)
    values = {"category.effort": [1.0]}
    bench.engine.submit_classification(bench.project, 1, bench.admin, values)
    bench.engine.submit_classification(bench.project, 1, bench.admin, values)  # now v2
    with pytest.raises(StoreError) as info:
        bench.engine.submit_classification(
            bench.project, 1, bench.admin, values, expected_version=1
        )
    assert info.value.code == E_VERSION_STALE


def test_completion_without_mandatory_fields_is_fine(bench):
    load_papers(bench, 1)
    include_fully(bench, 1)
    record = bench.engine.submit_classification(
        bench.project, 1, bench.admin, {}, mark_complete=True
    )
    assert record["payload"]["completeness"] == "complete"
    with pytest.raises(StoreError) as info:
        bench.engine.get_classification(bench.project, 99, "ana")
    assert info.value.code == E_NOT_FOUND


# --- dynamic choice lists -------------------------------------------------


def test_dynamic_choice_lifecycle(bench):
    load_papers(bench, 1)
    options = bench.engine.add_dynamic_choice(bench.project, "category.tool", "WattsUp", "cam")
    assert options == [
        {"id": "category.tool.choice.powertop", "value": "powertop"},
        {"id": "category.tool.choice.rapl", "value": "rapl"},
        {"id": "category.tool.choice.wattsup", "value": "WattsUp"},
    ]
    assert bench.store.get_schema(bench.project).version == 2
    by_name = bench.engine.add_dynamic_choice(bench.project, "tool", "scope3", "ana")
    assert len(by_name) == 4
    with fails(E_DUPLICATE_CHOICE):
        bench.engine.add_dynamic_choice(bench.project, "tool", "RAPL", "ana")
    with fails(E_NOT_DYNAMIC):
        bench.engine.add_dynamic_choice(bench.project, "method", "interview", "ana")
    with fails(E_CONSTRAINT):
        bench.engine.add_dynamic_choice(bench.project, "tool", "   ", "ana")
    with fails(E_NOT_FOUND):
        bench.engine.add_dynamic_choice(bench.project, "toolbox", "x", "ana")
    with fails(E_FORBIDDEN):
        bench.engine.add_dynamic_choice(bench.project, "tool", "y", "stranger")

    include_fully(bench, 1)
    record = bench.engine.submit_classification(
        bench.project, 1, "ana", {"category.tool": ["WattsUp"]}
    )
    assert "category.tool.choice.wattsup" in record["refs"]


def test_retired_user_choice_reactivates(bench):
    bench.engine.add_dynamic_choice(bench.project, "tool", "joulemeter", "ana")
    cid = "category.tool.choice.joulemeter"
    schema = bench.store.get_schema(bench.project)
    plan = MigrationPlan(base_version=schema.version, ops=[MigrationOp(DEACTIVATE, cid, "choice")])
    apply_plan(bench.store, bench.project, plan, schema.policies)
    values = [o["value"] for o in bench.engine.add_dynamic_choice(bench.project, "tool", "joulemeter", "ana")]
    assert "joulemeter" in values
    element = bench.store.get_schema(bench.project).by_id()[cid]
    assert element.status == "active"
    assert element.deactivated_in is None
    assert bench.store.get_schema(bench.project).version == 4


def test_retired_model_choice_name_stays_reserved(bench):
    schema = bench.store.get_schema(bench.project)
    cid = "category.tool.choice.powertop"
    plan = MigrationPlan(base_version=schema.version, ops=[MigrationOp(DEACTIVATE, cid, "choice")])
    apply_plan(bench.store, bench.project, plan, schema.policies)
    with fails(E_DUPLICATE_CHOICE):
        bench.engine.add_dynamic_choice(bench.project, "tool", "powertop", "ana")


# --- statistics -----------------------------------------------------------


def funnel(bench):
    """Ten papers in every screening state the workflow can produce."""
    load_papers(bench, 10)
    include_fully(bench, 1)
    bench.engine.submit_classification(
        bench.project,
        1,
        bench.admin,
        {
            "category.effort": [10.0],
            "category.method": ["experiment"],
            "category.tool": ["rapl"],
            "category.granularity": ["function"],
        },
        mark_complete=True,
    )
    screen(bench, 2, "ana", "include")
    screen(bench, 2, "ben", "include")
    screen(bench, 2, "ana", "include", phase=bench.phase2)
    screen(bench, 2, "ben", "exclude", OFF, phase=bench.phase2)  # open conflict
    screen(bench, 3, "ana", "exclude", NPR)
    screen(bench, 3, "ben", "exclude", NPR)
    screen(bench, 4, "ana", "exclude", OFF)
    screen(bench, 4, "ben", "exclude", NPR)  # agreement, criteria differ
    screen(bench, 5, "ana", "include")
    screen(bench, 5, "ben", "exclude", OFF)
    screen(bench, 5, "cam", "exclude", OFF)  # resolvable majority
    screen(bench, 6, "ana", "include")
    screen(bench, 6, "ben", "exclude", NPR)  # tie, will escalate and stay open
    bench.engine.resolve_conflicts(bench.project, bench.phase, bench.admin)
    screen(bench, 7, "ana", "include")  # a single reviewer settles alone
    assign(bench, 8, "ana")  # assigned, undecided


def test_stats_track_the_screening_funnel(bench):
    funnel(bench)
    triage, fulltext = [s.to_dict() for s in bench.engine.stats(bench.project)]
    distributions = {
        "category.effort": {"10.0": 1},
        "category.method": {"experiment": 1},
        "category.tool": {"rapl": 1},
        "category.granularity": {"function": 1},
    }
    assert triage == {
        "phase": "triage",
        "phase_element": TRIAGE,
        "total": 10,
        "assigned": 8,
        "decided": 7,
        "included": 3,  # papers 1, 2, 7
        "excluded": 3,  # papers 3, 4, 5
        "pending": 4,  # 6 in conflict, 8 undecided, 9 and 10 untouched
        "conflicts": 1,
        "per_criterion": {NPR: 1, OFF: 2},
        "distributions": distributions,
    }
    assert fulltext == {
        "phase": "fulltext_pass",
        "phase_element": FULLTEXT,
        "total": 3,
        "assigned": 2,
        "decided": 2,
        "included": 1,
        "excluded": 0,
        "pending": 2,
        "conflicts": 1,
        "per_criterion": {},
        "distributions": distributions,
    }


def test_stats_agree_with_a_raw_recount(bench):
    funnel(bench)
    counted = oracles.recount(
        bench.store, bench.project, [(TRIAGE, "triage"), (FULLTEXT, "fulltext_pass")]
    )
    for mine, theirs in zip(bench.engine.stats(bench.project), counted):
        doc = mine.to_dict()
        for key, want in theirs.items():
            if key != "per_criterion":
                assert doc[key] == want, key


def test_stats_exports_round_trip(bench):
    funnel(bench)
    stats = bench.engine.stats(bench.project)
    doc = bench.engine.export_stats(bench.project, "json")
    assert doc == {"phases": [s.to_dict() for s in stats]}
    from srkit.engine import stats_from_csv

    restored = stats_from_csv(bench.engine.export_stats(bench.project, "csv"))
    assert len(restored) == 2
    for got, want in zip(restored, stats):
        doc = want.to_dict()
        doc["phase_element"] = ""  # not part of the export
        assert got.to_dict() == doc
    with fails(E_FORMAT):
        bench.engine.export_stats(bench.project, "xml")


def test_workflow_needs_an_installed_project(bench):
    bench.store.create_project("bare", "Bare", "root")
    with fails(E_NOT_FOUND):
        bench.engine.stats("bare")
    with fails(E_NOT_FOUND):
        bench.engine.auto_assign("bare", "triage", "root")
