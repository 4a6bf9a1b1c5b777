"""Ranking metrics and the paired t-test.

Conventions follow trec_eval: relevant means grade > 0, judged documents
missing from the corpus still count toward ideal DCG and the recall
denominator, and queries without relevant documents are left out of averages.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

EXPONENTIAL = "exponential"
LINEAR = "linear"


def _gain(grade: int, gain: str) -> float:
    if gain == EXPONENTIAL:
        return 2.0**grade - 1.0
    if gain == LINEAR:
        return float(grade)
    raise ValueError(f"unknown gain {gain!r}")


def ndcg_at_k(ranking: Sequence[str], qrels: Mapping[str, int], k: int = 10, gain: str = EXPONENTIAL) -> float:
    dcg = 0.0
    for i, doc_id in enumerate(ranking[:k]):
        grade = qrels.get(doc_id, 0)
        if grade > 0:
            dcg += _gain(grade, gain) / math.log2(i + 2)
    ideal_grades = sorted((g for g in qrels.values() if g > 0), reverse=True)[:k]
    idcg = sum(_gain(g, gain) / math.log2(i + 2) for i, g in enumerate(ideal_grades))
    return dcg / idcg if idcg > 0 else 0.0


def ndcg_at_10(ranking: Sequence[str], qrels: Mapping[str, int], gain: str = EXPONENTIAL) -> float:
    return ndcg_at_k(ranking, qrels, 10, gain)


def recall_at_k(ranking: Sequence[str], qrels: Mapping[str, int], k: int = 100) -> float:
    relevant = {d for d, g in qrels.items() if g > 0}
    if not relevant:
        return 0.0
    return len(relevant.intersection(ranking[:k])) / len(relevant)


def recall_at_100(ranking: Sequence[str], qrels: Mapping[str, int]) -> float:
    return recall_at_k(ranking, qrels, 100)


def has_relevant(qrels: Mapping[str, int]) -> bool:
    return any(g > 0 for g in qrels.values())


def fitness(mean_recall100: float, mean_ndcg10: float) -> float:
    return 0.8 * mean_recall100 + 0.2 * mean_ndcg10


# --- Student's t ---------------------------------------------------------------


def _betacf(a: float, b: float, x: float, max_iter: int = 300, eps: float = 3e-16) -> float:
    # Modified Lentz continued fraction for the incomplete beta function.
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > tiny else tiny)
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, 1.0 - x) / b


def student_t_sf_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    t2 = t * t
    x = df / (df + t2)
    if x > 0.5:
        # x rounds towards 1 for small |t|; use the complement, whose argument is exact.
        return 1.0 - regularized_incomplete_beta(0.5, df / 2.0, t2 / (df + t2))
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def paired_ttest(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-sided paired t-test; returns (t, p) with df = n - 1."""
    if len(a) != len(b):
        raise ValueError("paired samples must have equal length")
    n = len(a)
    if n < 2:
        raise ValueError("paired t-test needs at least two pairs")
    diffs = [x - y for x, y in zip(a, b)]
    mean = math.fsum(diffs) / n
    var = math.fsum((d - mean) ** 2 for d in diffs) / (n - 1)
    sd = math.sqrt(var)
    if sd == 0.0:
        if mean == 0.0:
            return 0.0, 1.0
        return math.copysign(math.inf, mean), 0.0
    t = mean / (sd / math.sqrt(n))
    return t, student_t_sf_two_sided(t, n - 1)
