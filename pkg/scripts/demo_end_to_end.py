#!/usr/bin/env python3
"""Scripted full review: install, import, screen, resolve, audit, classify.

Runs in process against an in-memory store, so no service needs to be up.
Every step is seeded; the same --seed prints the same numbers. One
disagreement is manufactured on purpose to walk the conflict pipeline
(split votes, escalation, arbiter ruling).
"""

from __future__ import annotations

import argparse
import random
from collections import Counter
from pathlib import Path

from srkit.dsl import parse, validate
from srkit.engine import ReviewEngine
from srkit.install import apply_plan, compile_model, policies_doc
from srkit.store import ProjectStore

MODEL = Path(__file__).with_name("thermal_comfort.relis")

# Three auditors so that with two screeners per paper there is always an
# auditor left who can validate or arbitrate it.
TEAM = {
    "lena": "lead",
    "omar": "auditor",
    "rita": "auditor",
    "sam": "auditor",
    "prav": "rater",
    "quinn": "rater",
}

VENUES = ["Indoor Air", "Build Environ", "Energy Build", "Ergonomics"]


def corpus(n: int) -> str:
    rows = ["bibkey,title,authors,venue,year,abstract,link"]
    for i in range(1, n + 1):
        rows.append(
            f"tc{i:03d},Office comfort field study {i},Vo; Marsh,"
            f"{VENUES[i % len(VENUES)]},{2008 + i % 16},"
            f"Responses of {20 + 3 * i} occupants to temperature shifts,"
        )
    return "\n".join(rows) + "\n"


def screen_phase(engine, project, phase, rng, include_rate, criteria, split_paper=None):
    """Every member empties their queue; verdicts are fixed per paper so
    reviewers agree, except for one optional manufactured split."""
    verdicts: dict[int, str] = {}
    split_votes = 0
    for member in TEAM:
        for item in engine.queue(project, member, phase):
            task = item["assignment"]
            if task["payload"]["kind"] != "screening":
                continue
            pid = task["paper_id"]
            if pid == split_paper:
                verdict = "include" if split_votes == 0 else "exclude"
                split_votes += 1
            else:
                if pid not in verdicts:
                    verdicts[pid] = "include" if rng.random() < include_rate else "exclude"
                verdict = verdicts[pid]
            criterion = rng.choice(criteria) if verdict == "exclude" else None
            engine.submit_decision(project, task["id"], member, verdict, criterion)
    return verdicts


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--papers", type=int, default=24)
    ap.add_argument("--export", metavar="PATH", help="also write the stats as CSV")
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    store = ProjectStore(credential_cost=4)
    for login in TEAM:
        store.create_user(login, f"pw-{login}", login.title())

    vm = validate(parse(MODEL.read_bytes(), origin=MODEL.name))
    project = vm.project.name
    store.create_project(project, vm.project.label, "lena")
    plan = compile_model(vm, project)
    apply_plan(store, project, plan, policies_doc(vm))
    for login, role in TEAM.items():
        if login != "lena":
            store.add_member(project, login, role)
    print(f"installed {project!r} ({len(plan.ops)} schema elements, team of {len(TEAM)})")

    engine = ReviewEngine(store)
    report = engine.import_papers(project, corpus(args.papers), "csv", "lena")
    print(f"imported {report['imported']} papers")

    schema = store.get_schema(project)
    criteria = [e.id for e in schema.active("criterion")]
    phases = [e.descriptor["name"] for e in schema.active("phase")]

    # First phase, with one manufactured disagreement.
    created = engine.auto_assign(project, phases[0], "lena", seed=args.seed)
    spread = Counter(a["payload"]["reviewer"] for a in created)
    load = ", ".join(f"{m}={spread[m]}" for m in sorted(spread))
    print(f"\n[{phases[0]}] {len(created)} assignments ({load})")
    split_pid = created[0]["paper_id"]
    screen_phase(engine, project, phases[0], rng, 0.6, criteria, split_paper=split_pid)
    cases = engine.list_conflicts(project, phases[0], "lena")
    print(f"screened; {len(cases)} conflict (paper {split_pid} was split on purpose)")
    engine.resolve_conflicts(project, phases[0], "lena")
    ruling = next(
        item
        for member in TEAM
        for item in engine.queue(project, member, phases[0])
        if item["assignment"]["payload"].get("purpose") == "arbitration"
    )
    arbiter = ruling["assignment"]["payload"]["reviewer"]
    engine.submit_decision(project, ruling["assignment"]["id"], arbiter, "include")
    print(f"majority tied, escalated; arbiter {arbiter} ruled include")

    tasks = engine.sample_validation(project, phases[0], "lena", seed=args.seed)
    for task in tasks:
        engine.submit_decision(
            project, task["id"], task["payload"]["reviewer"], "exclude", rng.choice(criteria)
        )
    print(f"validation: {len(tasks)} excluded papers re-checked, all confirmed")

    # Later phases screen cleanly.
    final_verdicts: dict[int, str] = {}
    for phase, rate in [(phases[1], 0.7), (phases[2], 0.55)]:
        created = engine.auto_assign(project, phase, "lena", seed=args.seed)
        final_verdicts = screen_phase(engine, project, phase, rng, rate, criteria)
        print(f"\n[{phase}] {len(created)} assignments, screened without conflicts")

    engine.add_dynamic_choice(project, "sensor", "anemometer", "prav")
    print("\nprav extended the sensor list with 'anemometer'")

    included = sorted(pid for pid, v in final_verdicts.items() if v == "include")
    climates = ["tropical", "temperate", "continental", "arid"]
    metrics = [("pmv", "seated"), ("adaptive", "mixed"), ("survey only", "mixed")]
    sensors = ["thermocouple", "hot wire", "globe", "anemometer"]
    for i, pid in enumerate(included):
        metric, posture = metrics[i % len(metrics)]
        values = {
            "category.sample_size": [20 + 7 * i],
            "category.season": ["winter" if i % 2 else "summer"],
            "category.climate": [climates[i % len(climates)]],
            "category.metric": [metric],
            "category.sensor": [sensors[i % len(sensors)]],
            "category.posture": [posture],
        }
        if metric == "pmv":
            values["category.scale_points"] = [7]
        engine.submit_classification(project, pid, "lena", values, mark_complete=True)
    print(f"classified {len(included)} papers included after {phases[-1]}")

    print()
    header = f"{'phase':<15}{'total':>6}{'assigned':>9}{'decided':>8}{'incl':>6}{'excl':>6}{'pend':>6}"
    print(header)
    print("-" * len(header))
    for s in engine.stats(project):
        print(
            f"{s.phase:<15}{s.total:>6}{s.assigned:>9}{s.decided:>8}"
            f"{s.included:>6}{s.excluded:>6}{s.pending:>6}"
        )

    if args.export:
        Path(args.export).write_text(engine.export_stats(project, "csv"))
        print(f"\nwrote {args.export}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
