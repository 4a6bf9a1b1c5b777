"""Evolved query likelihood with an enriched background model.

Score of document d for query q (q_u = unique in-vocabulary query terms)::

    S = sum_t w(t) * leaky(s_base(t, d)) + sum_t m(t, d) + AND(q, d) + LP(d)

where s_base is an EDR-gated Dirichlet log-likelihood ratio on a tempered,
df-mixed, uniformly floored collection model, with per-term adaptive TF
saturation tf ** beta(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..index import ChannelIndex, QueryRep, candidate_docs
from .ranking import Ranking, rank


@dataclass
class EvolvedQlConfig:
    tau: float = 0.85
    mix_df: float = 0.10
    mix_uniform: float = 0.03
    beta_span: float = 0.30
    mu: float = 1750.0
    edr_coeff: float = 0.45
    edr_clip: float = 2.5
    qw_exp: float = 0.6
    resid_coeff: float = 0.9
    resid_clip: float = 2.5
    leak: float = 0.12
    miss_coeff: float = 0.07
    and_coeff: float = 0.14
    and_scale: float = 3.0
    lp_coeff: float = 0.06

    def __post_init__(self) -> None:
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must lie in (0, 1]")
        for name in ("mix_df", "mix_uniform"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.mu <= 0:
            raise ValueError("mu must be > 0")
        if self.and_scale <= 0 or self.resid_clip <= 0:
            raise ValueError("and_scale and resid_clip must be > 0")

    @classmethod
    def seed_reduction(cls, mu: float = 2000.0) -> "EvolvedQlConfig":
        """Parameters under which every evolved component collapses to plain Dirichlet QL."""
        return cls(
            tau=1.0, mix_df=0.0, mix_uniform=0.0, beta_span=0.0, mu=mu, edr_coeff=0.0,
            qw_exp=1.0, resid_coeff=0.0, leak=1.0, miss_coeff=0.0, and_coeff=0.0, lp_coeff=0.0,
        )


@dataclass
class EnrichedLm:
    p_tau: dict[str, float]
    p_df: dict[str, float]
    p_c: dict[str, float]
    idf01: dict[str, float]

    @property
    def vocab_size(self) -> int:
        return len(self.p_c)

    def log_dispersion(self, term: str) -> float:
        """ln(P_df / P_C), the entity dispersion ratio in log space."""
        return math.log(self.p_df[term] / self.p_c[term])


def build_enriched_lm(index: ChannelIndex, cfg: EvolvedQlConfig | None = None) -> EnrichedLm:
    cfg = cfg or EvolvedQlConfig()
    stats = index.stats
    index.require_docs()
    vocab = sorted(stats.ctf)
    if not vocab:
        raise ValueError("cannot build a collection model over an empty vocabulary")
    n, total = stats.n_docs, stats.total_tokens

    tempered = {t: (stats.ctf[t] / total) ** cfg.tau for t in vocab}
    z = math.fsum(tempered.values())
    p_tau = {t: v / z for t, v in tempered.items()}
    p_df = {t: stats.df[t] / n for t in vocab}
    floor = cfg.mix_uniform / len(vocab)
    p_c = {
        t: (1.0 - cfg.mix_uniform) * ((1.0 - cfg.mix_df) * p_tau[t] + cfg.mix_df * p_df[t]) + floor
        for t in vocab
    }

    raw = {t: math.log((n + 1) / (stats.df[t] + 1)) for t in vocab}
    top = max(raw.values())
    # Every term occurs in every document: all equally rare.
    idf01 = {t: (r / top if top > 0 else 1.0) for t, r in raw.items()}
    return EnrichedLm(p_tau, p_df, p_c, idf01)


def beta(term: str, lm: EnrichedLm, cfg: EvolvedQlConfig | None = None) -> float:
    cfg = cfg or EvolvedQlConfig()
    return 1.0 - cfg.beta_span * (1.0 - lm.idf01[term])


def _clip(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def edr_gate(term: str, lm: EnrichedLm, cfg: EvolvedQlConfig | None = None) -> float:
    cfg = cfg or EvolvedQlConfig()
    return 1.0 + cfg.edr_coeff * _clip(lm.log_dispersion(term), -cfg.edr_clip, cfg.edr_clip)


def residual_weight(term: str, lm: EnrichedLm, cfg: EvolvedQlConfig | None = None) -> float:
    cfg = cfg or EvolvedQlConfig()
    return 1.0 + cfg.resid_coeff * _clip(lm.log_dispersion(term), 0.0, cfg.resid_clip) / cfg.resid_clip


def query_weight(term: str, qtf: int, lm: EnrichedLm, cfg: EvolvedQlConfig | None = None) -> float:
    cfg = cfg or EvolvedQlConfig()
    return (qtf * residual_weight(term, lm, cfg)) ** cfg.qw_exp


@dataclass
class _QlTerm:
    term: str
    omega: float
    beta: float
    gate: float
    mu_p: float
    tfs: dict[int, int]


@dataclass
class QlDocParts:
    weighted: float
    missing: float
    soft_and: float
    length_prior: float

    @property
    def score(self) -> float:
        return self.weighted + self.missing + self.soft_and + self.length_prior


def _prepare(index: ChannelIndex, lm: EnrichedLm, rep: QueryRep, cfg: EvolvedQlConfig) -> list[_QlTerm]:
    out = []
    for term, qtf in rep[index.channel].items():
        if term not in lm.p_c:
            continue
        out.append(
            _QlTerm(
                term,
                query_weight(term, qtf, lm, cfg),
                beta(term, lm, cfg),
                edr_gate(term, lm, cfg),
                cfg.mu * lm.p_c[term],
                index.tf_map(term),
            )
        )
    return out


def _doc_parts(index: ChannelIndex, terms: list[_QlTerm], doc: int, cfg: EvolvedQlConfig) -> QlDocParts:
    mu = cfg.mu
    dl = index.doc_lengths[doc]
    log_len_ratio = math.log((dl + mu) / mu)
    weighted = missing = and_sum = 0.0
    for t in terms:
        tf = t.tfs.get(doc, 0)
        tf_eff = tf**t.beta if tf else 0.0
        s_base = t.gate * (math.log1p(tf_eff / t.mu_p) - log_len_ratio)
        s = s_base if s_base >= 0 else cfg.leak * s_base
        weighted += t.omega * s
        if tf == 0:
            missing += cfg.miss_coeff * t.omega * math.log(t.mu_p / (dl + mu))
        and_sum += math.tanh(t.omega * max(s, 0.0) / cfg.and_scale)
    soft_and = cfg.and_coeff * and_sum / len(terms) if terms else 0.0
    dev = math.log(dl) - math.log(index.stats.avgdl)
    return QlDocParts(weighted, missing, soft_and, -cfg.lp_coeff * dev * dev)


def score_parts(
    index: ChannelIndex, lm: EnrichedLm, rep: QueryRep, doc: int, cfg: EvolvedQlConfig | None = None
) -> QlDocParts:
    cfg = cfg or EvolvedQlConfig()
    return _doc_parts(index, _prepare(index, lm, rep, cfg), doc, cfg)


def score_evolved_ql(
    index: ChannelIndex, lm: EnrichedLm, rep: QueryRep, cfg: EvolvedQlConfig | None = None
) -> Ranking:
    cfg = cfg or EvolvedQlConfig()
    index.require_docs()
    terms = _prepare(index, lm, rep, cfg)
    scores = {d: _doc_parts(index, terms, d, cfg).score for d in candidate_docs(index, rep)}
    return rank(scores, index.doc_ids)
