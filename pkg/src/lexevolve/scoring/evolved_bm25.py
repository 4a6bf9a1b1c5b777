"""Evolved multi-channel BM25.

The final score adds a shared core function R evaluated in four token
channels::

    S = R_base + w_pfx * R_pfx + w_bi * R_bi + w_mic * G(q) * R_mic

and R itself is doubly log-saturated evidence scaled by bounded multipliers::

    R = ln(1 + E) * B_cov * B_spec * B_coord * B_anc / B_len

Each channel uses its own statistics (N, df, avgdl counted in that channel's
tokens). The micro-channel gate G is computed from base-channel IDFs.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from ..index import ChannelIndex, EmptyCorpusError, QueryRep, candidate_docs
from ..tokenize import TokenChannel
from .ranking import Ranking, rank


@dataclass
class EvolvedBm25Config:
    w_pfx: float = 0.1
    w_bi: float = 0.08
    w_mic: float = 0.12
    gate_center: float = 2.2
    gate_scale: float = 1.0
    cov_coeff: float = 0.25
    spec_coeff: float = 0.10
    pmi_cap: float = 3.0
    len_floor: float = 25.0
    coord_coeff: float = 0.20
    tau_coord: float = 2.5
    anc_coeff: float = 0.14
    anc_threshold: float = 4.2
    len_coeff: float = 0.15
    qtf_exp: float = 0.5
    idf_sat_exp: float = 0.6
    idf_shift: float = 1.25

    def __post_init__(self) -> None:
        for name, value in vars(self).items():
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")
        if self.gate_scale == 0:
            raise ValueError("gate_scale must be positive")

    def channel_weight(self, channel: TokenChannel) -> float:
        return {
            TokenChannel.BASE: 1.0,
            TokenChannel.PREFIX: self.w_pfx,
            TokenChannel.BIGRAM: self.w_bi,
            TokenChannel.MICRO: self.w_mic,
        }[channel]


@dataclass
class ChannelScoreParts:
    E: float
    W: float
    W_M: float
    B_cov: float
    B_spec: float
    B_coord: float
    B_anc: float
    B_len: float
    n_matched: int
    n_query_terms: int

    @property
    def R(self) -> float:
        return math.log1p(self.E) * self.B_cov * self.B_spec * self.B_coord * self.B_anc / self.B_len


def evolved_idf(df: int, n_docs: int) -> float:
    return -math.log((df + 1) / (n_docs + 2))


def term_weight(qtf: int, idf: float, cfg: EvolvedBm25Config | None = None) -> float:
    cfg = cfg or EvolvedBm25Config()
    if idf <= 0:
        return 0.0
    return (
        qtf**cfg.qtf_exp
        * idf
        * (idf / (idf + 1.0)) ** cfg.idf_sat_exp
        * idf / (idf + cfg.idf_shift)
    )


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def gate(query_terms: Iterable[str], index_base: ChannelIndex, cfg: EvolvedBm25Config | None = None) -> float:
    """Logistic gate on the mean IDF of the in-vocabulary query terms; 0 if there are none."""
    cfg = cfg or EvolvedBm25Config()
    stats = index_base.stats
    idfs = [evolved_idf(stats.df[t], stats.n_docs) for t in set(query_terms) if t in stats.df]
    if not idfs:
        return 0.0
    mean_idf = sum(idfs) / len(idfs)
    return _sigmoid((mean_idf - cfg.gate_center) / cfg.gate_scale)


@dataclass
class _PreparedTerm:
    term: str
    df: int
    idf: float
    weight: float
    tfs: dict[int, int]


@dataclass
class PreparedChannelQuery:
    """Per-query quantities that do not depend on the document."""

    terms: list[_PreparedTerm]
    W: float
    coord_calibration: float


def prepare_channel_query(
    index: ChannelIndex, query_terms: Mapping[str, int], cfg: EvolvedBm25Config | None = None
) -> PreparedChannelQuery:
    cfg = cfg or EvolvedBm25Config()
    stats = index.stats
    terms = []
    for term, qtf in query_terms.items():
        df = stats.df.get(term, 0)
        idf = evolved_idf(df, stats.n_docs)
        terms.append(_PreparedTerm(term, df, idf, term_weight(qtf, idf, cfg), index.tf_map(term)))
    W = sum(t.weight for t in terms)
    calib = cfg.tau_coord / (cfg.tau_coord + math.log1p(W))
    return PreparedChannelQuery(terms, W, calib)


def core_score(
    index: ChannelIndex,
    query: Mapping[str, int] | PreparedChannelQuery,
    doc: int,
    cfg: EvolvedBm25Config | None = None,
) -> ChannelScoreParts:
    """All components of R for one (query, document) pair in one channel."""
    cfg = cfg or EvolvedBm25Config()
    if not isinstance(query, PreparedChannelQuery):
        query = prepare_channel_query(index, query, cfg)
    n_docs = index.stats.n_docs
    dl = index.doc_lengths[doc]
    W = query.W

    E = W_M = spec_sum = 0.0
    anchor = 0.0
    n_matched = 0
    pmi_len = max(dl, cfg.len_floor)
    for t in query.terms:
        tf = t.tfs.get(doc, 0)
        if tf == 0:
            continue
        n_matched += 1
        E += t.weight * math.log1p(tf)
        W_M += t.weight
        pmi = math.log(tf * n_docs / (pmi_len * t.df))
        if pmi > 0:
            spec_sum += t.weight * min(pmi, cfg.pmi_cap)
        if t.idf > cfg.anc_threshold:
            anchor = max(anchor, (t.idf - cfg.anc_threshold) / t.idf)

    n_q = len(query.terms)
    if W > 0:
        b_cov = 1.0 + cfg.cov_coeff * W_M / W
        b_spec = 1.0 + cfg.spec_coeff * spec_sum / W
    else:
        b_cov = b_spec = 1.0
    b_coord = 1.0 + cfg.coord_coeff * query.coord_calibration * (n_matched / n_q if n_q else 0.0)
    b_anc = 1.0 + cfg.anc_coeff * math.log1p(anchor)
    b_len = 1.0 + cfg.len_coeff * math.log1p((dl + 1.0) / (index.stats.avgdl + 1.0))
    return ChannelScoreParts(E, W, W_M, b_cov, b_spec, b_coord, b_anc, b_len, n_matched, n_q)


def channel_scores(
    index: ChannelIndex, query_terms: Mapping[str, int], docs: Iterable[int], cfg: EvolvedBm25Config | None = None
) -> dict[int, float]:
    cfg = cfg or EvolvedBm25Config()
    prepared = prepare_channel_query(index, query_terms, cfg)
    return {d: core_score(index, prepared, d, cfg).R for d in docs}


def score_evolved_bm25(
    indexes: Mapping[TokenChannel, ChannelIndex],
    rep: QueryRep,
    cfg: EvolvedBm25Config | None = None,
) -> Ranking:
    cfg = cfg or EvolvedBm25Config()
    base = indexes[TokenChannel.BASE]
    if base.n_docs == 0:
        raise EmptyCorpusError("cannot score against an empty corpus")

    weights: dict[TokenChannel, float] = {}
    for channel in indexes:
        w = cfg.channel_weight(channel)
        if channel is TokenChannel.MICRO:
            w *= gate(rep[TokenChannel.BASE], base, cfg)
        if w > 0:
            weights[channel] = w

    active = {c: indexes[c] for c in weights}
    docs = candidate_docs(active, rep)
    totals: dict[int, float] = dict.fromkeys(docs, 0.0)
    for channel, w in weights.items():
        terms = rep[channel]
        if not terms:
            continue
        for doc, r in channel_scores(indexes[channel], Counter(terms), docs, cfg).items():
            totals[doc] += w * r
    return rank(totals, base.doc_ids)
