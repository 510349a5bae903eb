"""Balanced reviewer assignment.

Pure function; the caller fixes the reviewer order and supplies pre-existing
loads. Reviewer identities are opaque: the algorithm only ever distinguishes
positions in the given list, so renaming reviewers (keeping list order)
renames the output and nothing else.
"""

from __future__ import annotations

from .rng import SplitMix64


def balanced_assignment(
    papers: list,
    reviewers: list,
    k: int,
    existing_load: dict | None = None,
    seed: int = 0,
) -> list[tuple[object, object]]:
    """Assign each paper to k distinct reviewers, keeping loads even.

    Greedy: per paper, pick the k least-loaded positions, breaking ties by
    a fresh seeded shuffle so ties spread uniformly instead of favoring
    early positions. Starting from equal loads the result spread is at
    most 1; pre-existing imbalance is evened out but not reshuffled.
    """
    if k > len(reviewers):
        raise ValueError("more reviewers per paper than reviewers")
    existing_load = existing_load or {}
    loads = [existing_load.get(r, 0) for r in reviewers]
    rng = SplitMix64(seed)
    out: list[tuple[object, object]] = []
    positions = list(range(len(reviewers)))
    for paper in papers:
        tie_rank = rng.shuffle(positions[:])
        order = sorted(positions, key=lambda i: (loads[i], tie_rank[i]))
        for i in order[:k]:
            loads[i] += 1
            out.append((paper, reviewers[i]))
    return out
