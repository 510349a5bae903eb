"""Conflict strategy evaluation (pure)."""

from __future__ import annotations

AGREE_STRATEGIES = ("unanimity", "majority", "arbiter")

ESCALATE = "escalate"


def resolve_verdicts(strategy: str, verdicts: list[str]) -> str:
    """Reduce a verdict vector to "include", "exclude", or "escalate".

    Agreement resolves under every strategy. On disagreement, majority
    takes a strictly larger vote count and escalates ties; unanimity and
    arbiter escalate always.
    """
    if strategy not in AGREE_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if not verdicts:
        raise ValueError("empty verdict vector")
    distinct = set(verdicts)
    if not distinct <= {"include", "exclude"}:
        raise ValueError(f"bad verdicts {sorted(distinct - {'include', 'exclude'})}")
    if len(distinct) == 1:
        return verdicts[0]
    if strategy == "majority":
        inc = verdicts.count("include")
        exc = verdicts.count("exclude")
        if inc > exc:
            return "include"
        if exc > inc:
            return "exclude"
    return ESCALATE
