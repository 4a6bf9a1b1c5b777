"""Scorer registry and a small retriever wrapper used by the evaluator and CLI."""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from ..corpus import Document
from ..index import ChannelIndex, QueryRep, build_indexes, represent_query
from ..tokenize import ALL_CHANNELS, TokenChannel
from .baseline import Bm25Params, QlParams, score_bm25, score_bm25_plus, score_ql_dirichlet, score_ql_jm
from .evolved_bm25 import EvolvedBm25Config, score_evolved_bm25
from .evolved_ql import EnrichedLm, EvolvedQlConfig, build_enriched_lm, score_evolved_ql
from .ranking import Ranking, rank

BASE_ONLY = (TokenChannel.BASE,)


@dataclass(frozen=True)
class ScorerSpec:
    name: str
    params_cls: type
    channels: tuple[TokenChannel, ...]


SCORERS: dict[str, ScorerSpec] = {
    "bm25": ScorerSpec("bm25", Bm25Params, BASE_ONLY),
    "bm25plus": ScorerSpec("bm25plus", Bm25Params, BASE_ONLY),
    "ql-dir": ScorerSpec("ql-dir", QlParams, BASE_ONLY),
    "ql-jm": ScorerSpec("ql-jm", QlParams, BASE_ONLY),
    "evolved-bm25": ScorerSpec("evolved-bm25", EvolvedBm25Config, ALL_CHANNELS),
    "evolved-ql": ScorerSpec("evolved-ql", EvolvedQlConfig, BASE_ONLY),
}


class UnknownScorerError(ValueError):
    pass


def make_params(name: str, overrides: dict[str, Any] | None = None):
    """Instantiate the parameter dataclass for ``name`` with validated overrides."""
    try:
        spec = SCORERS[name]
    except KeyError:
        raise UnknownScorerError(f"unknown scorer {name!r}; choose from {sorted(SCORERS)}") from None
    overrides = dict(overrides or {})
    known = {f.name for f in dataclasses.fields(spec.params_cls)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise ValueError(f"unknown parameters for {name}: {unknown}")
    return spec.params_cls(**{k: float(v) for k, v in overrides.items()})


@dataclass
class Retriever:
    """Indexes a corpus for one scorer and answers queries against it."""

    name: str
    params: Any
    indexes: dict[TokenChannel, ChannelIndex]
    lm: EnrichedLm | None = None
    index_seconds: float = 0.0
    _search: Callable[[QueryRep], Ranking] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        base = self.indexes[TokenChannel.BASE]
        p = self.params
        self._search = {
            "bm25": lambda rep: score_bm25(base, rep, p),
            "bm25plus": lambda rep: score_bm25_plus(base, rep, p),
            "ql-dir": lambda rep: score_ql_dirichlet(base, rep, p),
            "ql-jm": lambda rep: score_ql_jm(base, rep, p),
            "evolved-bm25": lambda rep: score_evolved_bm25(self.indexes, rep, p),
            "evolved-ql": lambda rep: score_evolved_ql(base, self.lm, rep, p),
        }[self.name]

    @classmethod
    def build(
        cls,
        name: str,
        documents: Sequence[Document],
        params: Any = None,
        indexes: dict[TokenChannel, ChannelIndex] | None = None,
    ) -> "Retriever":
        if params is None or isinstance(params, dict):
            params = make_params(name, params)
        spec = SCORERS[name]
        start = time.perf_counter()
        if indexes is None:
            indexes = build_indexes(documents, spec.channels)
        lm = build_enriched_lm(indexes[TokenChannel.BASE], params) if name == "evolved-ql" else None
        elapsed = time.perf_counter() - start
        return cls(name, params, indexes, lm, elapsed)

    @property
    def channels(self) -> tuple[TokenChannel, ...]:
        return SCORERS[self.name].channels

    def search(self, text: str, k: int | None = None) -> Ranking:
        ranking = self._search(represent_query(text, self.channels))
        return ranking if k is None else ranking[:k]


__all__ = [
    "SCORERS",
    "Bm25Params",
    "QlParams",
    "EvolvedBm25Config",
    "EvolvedQlConfig",
    "Retriever",
    "make_params",
    "rank",
    "Ranking",
]
