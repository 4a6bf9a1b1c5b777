"""Seed ranking functions: BM25, BM25+, query likelihood (Dirichlet and Jelinek-Mercer).

Every scorer iterates unique query terms and multiplies the per-term score by
the query term frequency, so repeated query words count once per occurrence.
Only documents containing at least one query term are scored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..index import ChannelIndex, QueryRep, candidate_docs
from .ranking import Ranking, rank


@dataclass
class Bm25Params:
    k1: float = 0.9
    b: float = 0.4
    delta: float = 1.0  # BM25+ only

    def __post_init__(self) -> None:
        if self.k1 < 0:
            raise ValueError("k1 must be >= 0")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must lie in [0, 1]")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")


@dataclass
class QlParams:
    mu: float = 2000.0
    alpha: float = 0.1  # Jelinek-Mercer only

    def __post_init__(self) -> None:
        if self.mu <= 0:
            raise ValueError("mu must be > 0")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")


def bm25_idf(df: int, n_docs: int) -> float:
    return math.log((n_docs - df + 0.5) / (df + 0.5))


def _bm25_scores(index: ChannelIndex, rep: QueryRep, params: Bm25Params, delta: float) -> dict[int, float]:
    index.require_docs()
    stats = index.stats
    k1, b = params.k1, params.b
    lengths = index.doc_lengths
    norm = [k1 * (1.0 - b + b * dl / stats.avgdl) for dl in lengths]
    scores: dict[int, float] = {}
    for term, qtf in rep[index.channel].items():
        plist = index.postings.get(term)
        if not plist:
            continue
        idf = bm25_idf(stats.df[term], stats.n_docs)
        for doc, tf in plist:
            tf_part = tf * (k1 + 1.0) / (tf + norm[doc])
            scores[doc] = scores.get(doc, 0.0) + qtf * idf * (tf_part + delta)
    return scores


def score_bm25(index: ChannelIndex, rep: QueryRep, params: Bm25Params | None = None) -> Ranking:
    params = params or Bm25Params()
    return rank(_bm25_scores(index, rep, params, 0.0), index.doc_ids)


def score_bm25_plus(index: ChannelIndex, rep: QueryRep, params: Bm25Params | None = None) -> Ranking:
    params = params or Bm25Params()
    return rank(_bm25_scores(index, rep, params, params.delta), index.doc_ids)


def _in_vocab_terms(index: ChannelIndex, rep: QueryRep) -> list[tuple[str, int, float, dict[int, int]]]:
    stats = index.stats
    out = []
    for term, qtf in rep[index.channel].items():
        if stats.ctf.get(term, 0) == 0:
            continue  # out of vocabulary: log(0) otherwise
        out.append((term, qtf, stats.p_collection(term), index.tf_map(term)))
    return out


def score_ql_dirichlet(index: ChannelIndex, rep: QueryRep, params: QlParams | None = None) -> Ranking:
    params = params or QlParams()
    index.require_docs()
    mu = params.mu
    terms = _in_vocab_terms(index, rep)
    scores: dict[int, float] = {}
    for doc in candidate_docs(index, rep):
        denom = index.doc_lengths[doc] + mu
        s = 0.0
        for _, qtf, p, tfs in terms:
            s += qtf * math.log((tfs.get(doc, 0) + mu * p) / denom)
        scores[doc] = s
    return rank(scores, index.doc_ids)


def score_ql_jm(index: ChannelIndex, rep: QueryRep, params: QlParams | None = None) -> Ranking:
    params = params or QlParams()
    index.require_docs()
    alpha = params.alpha
    terms = _in_vocab_terms(index, rep)
    scores: dict[int, float] = {}
    for doc in candidate_docs(index, rep):
        dl = index.doc_lengths[doc]
        if dl == 0:
            continue
        s = 0.0
        for _, qtf, p, tfs in terms:
            s += qtf * math.log((1.0 - alpha) * tfs.get(doc, 0) / dl + alpha * p)
        scores[doc] = s
    return rank(scores, index.doc_ids)
