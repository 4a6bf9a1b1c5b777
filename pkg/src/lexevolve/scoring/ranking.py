from __future__ import annotations

from typing import Mapping, Sequence

Ranking = list[tuple[str, float]]


def rank(scores: Mapping[int, float], doc_ids: Sequence[str], k: int | None = None) -> Ranking:
    """Sort scored ordinals by descending score, ties by ascending doc id."""
    ranked = sorted(((doc_ids[o], s) for o, s in scores.items()), key=lambda p: (-p[1], p[0]))
    return ranked if k is None else ranked[:k]
