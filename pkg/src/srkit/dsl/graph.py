"""Topological ordering of categories by their drill-down dependencies."""

from __future__ import annotations

from .model import ValidatedModel


def dependency_graph(vm: ValidatedModel) -> list[str]:
    """Return all category names, every dependency parent before its
    dependents, ties broken by declaration order.
    """
    order = [cat.name for cat, _, _ in vm.model.iter_categories()]
    index = {name: i for i, name in enumerate(order)}
    dependents: dict[str, list[str]] = {name: [] for name in order}
    indegree = {name: 0 for name in order}
    for cat, _, _ in vm.model.iter_categories():
        if cat.depends_on is not None and cat.depends_on.parent in index:
            dependents[cat.depends_on.parent].append(cat.name)
            indegree[cat.name] += 1

    ready = sorted((name for name in order if indegree[name] == 0), key=index.get)
    out: list[str] = []
    while ready:
        name = ready.pop(0)
        out.append(name)
        changed = False
        for dep in dependents[name]:
            indegree[dep] -= 1
            if indegree[dep] == 0:
                ready.append(dep)
                changed = True
        if changed:
            ready.sort(key=index.get)
    return out
