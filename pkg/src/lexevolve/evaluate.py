"""Running a scorer over datasets and summarising the results."""

from __future__ import annotations

import json
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Mapping, Sequence

from .corpus import Dataset, ScoredRun
from .metrics import EXPONENTIAL, fitness, has_relevant, ndcg_at_10, paired_ttest, recall_at_100
from .scoring import Retriever

RUN_DEPTH = 100


@dataclass
class QueryMetrics:
    ndcg10: float
    recall100: float


@dataclass
class LatencyStats:
    ms_per_unit: float
    stdev_ms: float
    units: int
    repeats: int


def measure_latency(fn: Callable[[], Any], units: int, repeats: int = 1) -> LatencyStats:
    """Wall-clock milliseconds per unit of work for ``fn`` over ``repeats`` runs."""
    if units <= 0:
        raise ValueError("latency workload must contain at least one unit")
    samples = []
    for _ in range(max(1, repeats)):
        start = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - start) * 1000.0 / units)
    stdev = statistics.stdev(samples) if len(samples) > 1 else 0.0
    return LatencyStats(statistics.fmean(samples), stdev, units, len(samples))


def per_query_metrics(
    run: ScoredRun, qrels: Mapping[str, Mapping[str, int]], gain: str = EXPONENTIAL
) -> dict[str, QueryMetrics]:
    """Metrics for every judged query with at least one relevant document.

    Judged queries absent from the run score zero.
    """
    out = {}
    for qid in sorted(qrels):
        judged = qrels[qid]
        if not has_relevant(judged):
            continue
        ranking = run.doc_ids(qid)
        out[qid] = QueryMetrics(ndcg_at_10(ranking, judged, gain), recall_at_100(ranking, judged))
    return out


@dataclass
class DatasetMetrics:
    ndcg10: float
    recall100: float
    n_queries: int
    indexing_ms_per_doc: float = 0.0
    query_ms_per_query: float = 0.0


def summarize(per_query: Mapping[str, QueryMetrics]) -> tuple[float, float]:
    if not per_query:
        return 0.0, 0.0
    n = len(per_query)
    return (
        math.fsum(m.ndcg10 for m in per_query.values()) / n,
        math.fsum(m.recall100 for m in per_query.values()) / n,
    )


@dataclass
class EvalReport:
    datasets: dict[str, DatasetMetrics] = field(default_factory=dict)
    fitness: float = 0.0
    extra: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_datasets(cls, datasets: Mapping[str, DatasetMetrics], **extra) -> "EvalReport":
        if not datasets:
            raise ValueError("fitness needs at least one dataset")
        ds = dict(datasets)
        n = len(ds)
        mean_r = math.fsum(d.recall100 for d in ds.values()) / n
        mean_n = math.fsum(d.ndcg10 for d in ds.values()) / n
        return cls(ds, fitness(mean_r, mean_n), dict(extra))

    @property
    def mean_ndcg10(self) -> float:
        return math.fsum(d.ndcg10 for d in self.datasets.values()) / len(self.datasets) if self.datasets else 0.0

    @property
    def mean_recall100(self) -> float:
        return math.fsum(d.recall100 for d in self.datasets.values()) / len(self.datasets) if self.datasets else 0.0

    @property
    def indexing_ms_per_doc(self) -> float:
        return statistics.fmean(d.indexing_ms_per_doc for d in self.datasets.values()) if self.datasets else 0.0

    @property
    def query_ms_per_query(self) -> float:
        return statistics.fmean(d.query_ms_per_query for d in self.datasets.values()) if self.datasets else 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "datasets": {k: asdict(v) for k, v in self.datasets.items()},
            "mean_ndcg10": self.mean_ndcg10,
            "mean_recall100": self.mean_recall100,
            "fitness": self.fitness,
            "indexing_ms_per_doc": self.indexing_ms_per_doc,
            "query_ms_per_query": self.query_ms_per_query,
            **({"extra": self.extra} if self.extra else {}),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EvalReport":
        datasets = {k: DatasetMetrics(**v) for k, v in data.get("datasets", {}).items()}
        if "fitness" in data:
            return cls(datasets, float(data["fitness"]), dict(data.get("extra", {})))
        return cls.from_datasets(datasets)

    def table(self) -> str:
        lines = [f"{'dataset':<24}{'nDCG@10':>10}{'R@100':>10}{'queries':>9}{'ms/doc':>10}{'ms/query':>10}"]
        for name, d in self.datasets.items():
            lines.append(
                f"{name:<24}{d.ndcg10:>10.4f}{d.recall100:>10.4f}{d.n_queries:>9d}"
                f"{d.indexing_ms_per_doc:>10.4f}{d.query_ms_per_query:>10.3f}"
            )
        lines.append(f"{'macro-average':<24}{self.mean_ndcg10:>10.4f}{self.mean_recall100:>10.4f}")
        lines.append(f"fitness = 0.8*R@100 + 0.2*nDCG@10 = {self.fitness:.6f}")
        return "\n".join(lines)


def retrieve(
    retriever: Retriever, dataset: Dataset, depth: int = RUN_DEPTH, workers: int = 1
) -> tuple[ScoredRun, float]:
    """Score every query; returns the run and total query wall time in seconds.

    Latency figures are only comparable across runs with ``workers=1``.
    """
    texts = [q.text for q in dataset.queries]
    start = time.perf_counter()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: retriever.search(t, depth), texts))
    else:
        results = [retriever.search(t, depth) for t in texts]
    elapsed = time.perf_counter() - start
    return ScoredRun({q.id: r for q, r in zip(dataset.queries, results)}), elapsed


def evaluate_dataset(
    scorer: str,
    dataset: Dataset,
    params: Any = None,
    gain: str = EXPONENTIAL,
    workers: int = 1,
    indexes: dict | None = None,
    indexing_ms_per_doc: float | None = None,
) -> tuple[DatasetMetrics, ScoredRun, dict[str, QueryMetrics]]:
    if not dataset.queries:
        raise ValueError(f"dataset {dataset.name!r} has no queries")
    retriever = Retriever.build(scorer, dataset.documents, params, indexes=indexes)
    run, q_seconds = retrieve(retriever, dataset, workers=workers)
    per_query = per_query_metrics(run, dataset.qrels_by_query(), gain)
    ndcg, rec = summarize(per_query)
    if indexing_ms_per_doc is None:
        indexing_ms_per_doc = retriever.index_seconds * 1000.0 / max(1, len(dataset.documents))
    metrics = DatasetMetrics(
        ndcg10=ndcg,
        recall100=rec,
        n_queries=len(per_query),
        indexing_ms_per_doc=indexing_ms_per_doc,
        query_ms_per_query=q_seconds * 1000.0 / len(dataset.queries),
    )
    return metrics, run, per_query


def evaluate(
    scorer: str, datasets: Sequence[Dataset], params: Any = None, gain: str = EXPONENTIAL, workers: int = 1
) -> EvalReport:
    results = {}
    for ds in datasets:
        metrics, _, _ = evaluate_dataset(scorer, ds, params, gain, workers)
        results[ds.name] = metrics
    return EvalReport.from_datasets(results, scorer=scorer)


@dataclass
class Comparison:
    metric: str
    n: int
    mean_a: float
    mean_b: float
    t: float
    p: float

    @property
    def mean_diff(self) -> float:
        return self.mean_a - self.mean_b

    @property
    def significant(self) -> bool:
        return self.p < 0.05


def compare_runs(
    run_a: ScoredRun, run_b: ScoredRun, qrels: Mapping[str, Mapping[str, int]], gain: str = EXPONENTIAL
) -> list[Comparison]:
    if set(run_a.rankings) != set(run_b.rankings):
        only_a = sorted(set(run_a.rankings) - set(run_b.rankings))
        only_b = sorted(set(run_b.rankings) - set(run_a.rankings))
        raise ValueError(f"runs cover different queries (only in A: {only_a[:5]}, only in B: {only_b[:5]})")
    judged = {q: rel for q, rel in qrels.items() if q in run_a.rankings}
    ma = per_query_metrics(run_a, judged, gain)
    mb = per_query_metrics(run_b, judged, gain)
    qids = sorted(ma)
    out = []
    for metric in ("ndcg10", "recall100"):
        a = [getattr(ma[q], metric) for q in qids]
        b = [getattr(mb[q], metric) for q in qids]
        t, p = paired_ttest(a, b)
        out.append(Comparison(metric, len(qids), statistics.fmean(a), statistics.fmean(b), t, p))
    return out
