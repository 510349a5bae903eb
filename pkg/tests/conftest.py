"""Shared fixtures: an installed demo project with a small screening team."""

from __future__ import annotations

from types import SimpleNamespace

import pytest

from srkit.dsl import parse, validate
from srkit.engine import ReviewEngine
from srkit.install import apply_plan, diff, policies_doc
from srkit.store import ProjectStore

SAMPLE = """\
project ergo "Energy Regression Review"

roles {
  lead: admin
  vetter: senior
  reader: reviewer
}

screening {
  phases {
    triage: abstract
    fulltext_pass: fulltext
  }
  assign { mode automatic reviewers 2 }
  conflict { strategy majority arbiter vetter }
  validation { percent 20 target excluded validator vetter }
  exclusion {
    "Not peer reviewed"
    "Off topic"
    "No measurements reported"
  }
}

classification {
  simple effort "Person Months": real range(0, 600)
  list method "Research Method": ("experiment", "case study", "survey")
  dynamiclist tool "Measurement Tool": ("powertop", "rapl")
  list granularity "Granularity": ("function", "process", "system") \
depends on method ("experiment" -> {"function", "process"}, \
"case study" -> {"process", "system"})
}
"""


def install_source(store: ProjectStore, source: str, creator: str = "root"):
    """Parse, validate, and install a model, creating the project if new."""
    vm = validate(parse(source))
    name = vm.project.name
    if not any(p["name"] == name for p in store.list_projects()):
        store.create_project(name, vm.project.label, creator)
    plan = diff(store.get_schema(name), vm, store.data_counts(name))
    apply_plan(store, name, plan, policies_doc(vm))
    return vm


def corpus_csv(n: int, start: int = 1) -> str:
    rows = ["bibkey,title,authors,venue,year,abstract,link"]
    for i in range(start, start + n):
        rows.append(
            f"key{i:03d},Paper number {i},Doe; Ray,EnCo,{2010 + i % 15},About paper {i},"
        )
    return "\n".join(rows) + "\n"


@pytest.fixture
def store():
    # Low hash cost: these credentials guard nothing.
    return ProjectStore(credential_cost=4)


def make_bench(store=None):
    """Installed 'ergo' project: one admin, one senior, three reviewers."""
    store = store if store is not None else ProjectStore(credential_cost=4)
    team = {
        "root": "lead",
        "vera": "vetter",
        "ana": "reader",
        "ben": "reader",
        "cam": "reader",
    }
    for login in team:
        store.create_user(login, f"pw-{login}", login.title())
    install_source(store, SAMPLE, creator="root")
    for login, role in team.items():
        if login != "root":  # the creator is already a member
            store.add_member("ergo", login, role)
    return SimpleNamespace(
        store=store,
        engine=ReviewEngine(store),
        project="ergo",
        admin="root",
        senior="vera",
        reviewers=["ana", "ben", "cam"],
        phase="triage",
        phase2="fulltext_pass",
    )


@pytest.fixture
def bench(store):
    return make_bench(store)
