"""Per-phase progress statistics and their CSV/JSON serializations."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field


@dataclass
class PhaseStats:
    phase: str  # phase name
    phase_element: str
    total: int = 0
    assigned: int = 0
    decided: int = 0
    included: int = 0
    excluded: int = 0
    pending: int = 0
    conflicts: int = 0
    per_criterion: dict[str, int] = field(default_factory=dict)
    distributions: dict[str, dict[str, int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "phase": self.phase,
            "phase_element": self.phase_element,
            "total": self.total,
            "assigned": self.assigned,
            "decided": self.decided,
            "included": self.included,
            "excluded": self.excluded,
            "pending": self.pending,
            "conflicts": self.conflicts,
            "per_criterion": dict(self.per_criterion),
            "distributions": {k: dict(v) for k, v in self.distributions.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PhaseStats":
        return cls(
            phase=d["phase"],
            phase_element=d["phase_element"],
            total=d["total"],
            assigned=d["assigned"],
            decided=d["decided"],
            included=d["included"],
            excluded=d["excluded"],
            pending=d["pending"],
            conflicts=d["conflicts"],
            per_criterion=dict(d["per_criterion"]),
            distributions={k: dict(v) for k, v in d["distributions"].items()},
        )


def stats_to_json(stats: list[PhaseStats]) -> dict:
    return {"phases": [s.to_dict() for s in stats]}


def stats_to_csv(stats: list[PhaseStats]) -> str:
    """Three blocks separated by blank lines: phase rows, exclusion
    criteria per phase, category value distributions per phase."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["phase", "total", "assigned", "decided", "included", "excluded", "pending", "conflicts"]
    )
    for s in stats:
        w.writerow(
            [s.phase, s.total, s.assigned, s.decided, s.included, s.excluded, s.pending, s.conflicts]
        )
    w.writerow([])
    w.writerow(["criteria", "phase", "criterion", "count"])
    for s in stats:
        for crit in sorted(s.per_criterion):
            w.writerow(["criteria", s.phase, crit, s.per_criterion[crit]])
    w.writerow([])
    w.writerow(["distribution", "phase", "category", "value", "count"])
    for s in stats:
        for cat in sorted(s.distributions):
            for value in sorted(s.distributions[cat]):
                w.writerow(["distribution", s.phase, cat, value, s.distributions[cat][value]])
    return buf.getvalue()


def stats_from_csv(doc: str) -> list[PhaseStats]:
    """Inverse of stats_to_csv (used to check the export round-trips)."""
    rows = list(csv.reader(io.StringIO(doc)))
    out: dict[str, PhaseStats] = {}
    section = "phases"
    for row in rows:
        if not row:
            continue
        if row[0] == "phase":
            section = "phases"
            continue
        if row[0] == "criteria" and row[1:] == ["phase", "criterion", "count"]:
            section = "criteria"
            continue
        if row[0] == "distribution" and row[1:] == ["phase", "category", "value", "count"]:
            section = "distributions"
            continue
        if section == "phases":
            s = PhaseStats(phase=row[0], phase_element="")
            (s.total, s.assigned, s.decided, s.included, s.excluded, s.pending, s.conflicts) = map(
                int, row[1:]
            )
            out[s.phase] = s
        elif section == "criteria":
            out[row[1]].per_criterion[row[2]] = int(row[3])
        else:
            out[row[1]].distributions.setdefault(row[2], {})[row[3]] = int(row[4])
    return list(out.values())
