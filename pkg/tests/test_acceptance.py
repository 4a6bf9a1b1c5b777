"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run alone with ``pytest -m acceptance -s`` (the verdict lines are printed
even without ``-s``).
"""

import io
import json
import math
import os
import random
import time
from collections import defaultdict

import pytest
import pytrec_eval
import scipy.stats

import oracles
from conftest import random_corpus, random_query
from lexevolve.corpus import Dataset, Document, QrelEntry, Query, ScoredRun, load_dataset
from lexevolve.evaluate import evaluate, evaluate_dataset, per_query_metrics
from lexevolve.evolve.database import EvolveConfig, Population, migrant_count, ring_neighbors
from lexevolve.evolve.evaluators import MarkerCountEvaluator
from lexevolve.evolve.loop import LineageLog, evolve_loop
from lexevolve.evolve.mutators import MarkerMutator
from lexevolve.evolve.runner import TOY_SEED_PROGRAM
from lexevolve.index import build_index, build_indexes, represent_query
from lexevolve.metrics import EXPONENTIAL, LINEAR, paired_ttest
from lexevolve.scoring.baseline import QlParams, score_bm25, score_bm25_plus, score_ql_dirichlet, score_ql_jm
from lexevolve.scoring.evolved_bm25 import core_score, gate
from lexevolve.scoring.evolved_ql import (
    EvolvedQlConfig,
    beta,
    build_enriched_lm,
    edr_gate,
    residual_weight,
    score_evolved_ql,
    score_parts,
)
from lexevolve.tokenize import ALL_CHANNELS, TokenChannel

pytestmark = pytest.mark.acceptance


@pytest.fixture
def verdict(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, f"{name}: {detail}"

    return emit


def test_baseline_oracle_equivalence(verdict):
    start = time.perf_counter()
    worst = 0.0
    key_mismatch = 0
    checked = 0
    for seed in range(100):
        rng = random.Random(seed)
        corpus = random_corpus(rng, max_docs=50, vocab_size=20)
        idx = build_index(corpus)
        tok = [d.text.split() for d in corpus]
        for _ in range(5):
            q = random_query(rng, vocab_size=20)
            rep = represent_query(q)
            qt = q.split()
            for got, want in (
                (score_bm25(idx, rep), oracles.bm25(tok, qt)),
                (score_bm25_plus(idx, rep), oracles.bm25(tok, qt, delta=1.0)),
                (score_ql_dirichlet(idx, rep), oracles.ql_dirichlet(tok, qt)),
                (score_ql_jm(idx, rep), oracles.ql_jm(tok, qt)),
            ):
                want = {corpus[i].id: s for i, s in want.items()}
                got = dict(got)
                key_mismatch += got.keys() != want.keys()
                for d in got.keys() & want.keys():
                    worst = max(worst, abs(got[d] - want[d]))
                    checked += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and key_mismatch == 0 and elapsed < 5.0
    verdict(
        "baseline oracle equivalence",
        ok,
        f"{checked} scores over 100 corpora, max |diff| {worst:.2e} (tol 1e-9), "
        f"candidate-set mismatches {key_mismatch}, {elapsed:.2f}s (limit 5s)",
    )


def test_evolved_bm25_bounds(verdict):
    start = time.perf_counter()
    violations = []
    scorings = gates = 0
    seed = 0
    while scorings < 10_000:
        rng = random.Random(10_000 + seed)
        seed += 1
        corpus = random_corpus(rng, max_docs=30, vocab_size=20)
        indexes = build_indexes(corpus, ALL_CHANNELS)
        for _ in range(3):
            rep = represent_query(random_query(rng, oov_rate=0.0), ALL_CHANNELS)
            base = indexes[TokenChannel.BASE]
            g = gate(rep[TokenChannel.BASE], base)
            gates += 1
            # The gate is defined as 0 for a query with no in-vocabulary base term.
            if any(t in base.stats.df for t in rep[TokenChannel.BASE]):
                if not 0 < g < 1:
                    violations.append(("gate", g))
            elif g != 0.0:
                violations.append(("gate of out-of-vocabulary query", g))
            for channel in ALL_CHANNELS:
                idx = indexes[channel]
                if not rep[channel]:
                    continue
                for doc in range(idx.n_docs):
                    p = core_score(idx, rep[channel], doc)
                    scorings += 1
                    checks = {
                        "B_cov": 1 <= p.B_cov <= 1.25,
                        "B_coord": 1 <= p.B_coord <= 1.20,
                        "B_anc": 1 <= p.B_anc <= 1 + 0.14 * math.log(2),
                        "B_spec": 1 <= p.B_spec <= 1.30 + 1e-12,
                        "B_len": p.B_len > 1,
                        "R": p.R >= 0,
                    }
                    violations.extend((k, p) for k, ok in checks.items() if not ok)
    elapsed = time.perf_counter() - start
    verdict(
        "evolved BM25 bound suite",
        not violations and elapsed < 10.0,
        f"{scorings} scorings, {gates} gates, {len(violations)} violations, {elapsed:.2f}s (limit 10s)",
    )


def test_evolved_ql_suite(verdict):
    violations = []
    cases = 0
    seed = 0
    while cases < 10_000:
        rng = random.Random(20_000 + seed)
        seed += 1
        corpus = random_corpus(rng, max_docs=30, vocab_size=20)
        idx = build_index(corpus)
        lm = build_enriched_lm(idx)
        if abs(math.fsum(lm.p_tau.values()) - 1.0) > 1e-9:
            violations.append("P_tau sum")
        for t in lm.p_c:
            if lm.p_c[t] < 0.03 / lm.vocab_size:
                violations.append("P_C floor")
            if not 0.70 <= beta(t, lm) <= 1.0:
                violations.append("beta")
            if not -0.125 <= edr_gate(t, lm) <= 2.125:
                violations.append("g")
            if not 1.0 <= residual_weight(t, lm) <= 1.9:
                violations.append("r")
        for _ in range(3):
            rep = represent_query(random_query(rng))
            for doc in range(idx.n_docs):
                p = score_parts(idx, lm, rep, doc)
                cases += 1
                if not 0.0 <= p.soft_and <= 0.14:
                    violations.append("AND")
                if p.length_prior > 0:
                    violations.append("LP")
    verdict("evolved QL suite", not violations, f"{cases} (query, doc) cases over {seed} corpora, "
            f"{len(violations)} violations")


def test_seed_reduction(verdict):
    worst = 0.0
    mismatched = 0
    cfg = EvolvedQlConfig.seed_reduction(mu=2000)
    for seed in range(100):
        rng = random.Random(30_000 + seed)
        corpus = random_corpus(rng)
        idx = build_index(corpus)
        lm = build_enriched_lm(idx, cfg)
        rep = represent_query(random_query(rng))
        got = dict(score_evolved_ql(idx, lm, rep, cfg))
        want = dict(score_ql_dirichlet(idx, rep, QlParams(mu=2000)))
        mismatched += got.keys() != want.keys()
        # The degenerate evolved score is a likelihood ratio against the collection model, so it differs
        # from the Dirichlet log-likelihood by the document-independent sum of qtf * ln P(t|C).
        offset = sum(qtf * math.log(idx.stats.p_collection(t)) for t, qtf in rep[TokenChannel.BASE].items()
                     if t in idx.stats.df)
        for d in got.keys() & want.keys():
            worst = max(worst, abs(got[d] + offset - want[d]))
    verdict(
        "seed reduction to Dirichlet QL",
        worst <= 1e-9 and mismatched == 0,
        f"100 fixtures, max |S + sum qtf ln P(t|C) - QL-Dir| = {worst:.2e} (tol 1e-9); "
        "equality holds up to that query-constant offset, i.e. identical rankings",
    )


METRIC_QRELS = {
    "q1": {"a": 2, "b": 1, "c": 0, "d": 1},
    "q2": {"e": 1},
    "q3": {"f": 3, "g": 2, "h": 1, "unretrieved": 2},
    "q4": {f"r{i}": 1 for i in range(12)},
    "q5": {"z": 1, "y": 2},
}
METRIC_RUNS = {
    "q1": ["b", "x", "a", "c", "d"],
    "q2": [f"n{i}" for i in range(10)] + ["e"],
    "q3": ["h", "g", "f"],
    "q4": [f"r{i}" for i in range(0, 12, 2)] + [f"n{i}" for i in range(100)] + [f"r{i}" for i in range(1, 12, 2)],
    "q5": ["z", "y"],
}


def test_metrics_against_trec_eval(verdict):
    trec_run = {q: {d: float(len(r) - i) for i, d in enumerate(r)} for q, r in METRIC_RUNS.items()}
    run = ScoredRun({q: [(d, float(len(r) - i)) for i, d in enumerate(r)] for q, r in METRIC_RUNS.items()})
    worst = 0.0
    for gain, qrels_for_trec in (
        (LINEAR, METRIC_QRELS),
        # trec_eval uses the grade itself as gain; feeding it 2^g - 1 reproduces exponential gain.
        (EXPONENTIAL, {q: {d: 2**g - 1 for d, g in rel.items()} for q, rel in METRIC_QRELS.items()}),
    ):
        ref = pytrec_eval.RelevanceEvaluator(qrels_for_trec, {"ndcg_cut.10", "recall.100"}).evaluate(trec_run)
        ours = per_query_metrics(run, METRIC_QRELS, gain)
        assert set(ours) == set(ref) == set(METRIC_QRELS)
        for q in ours:
            worst = max(worst, abs(ours[q].ndcg10 - ref[q]["ndcg_cut_10"]), abs(ours[q].recall100 - ref[q]["recall_100"]))
    verdict("metrics vs trec_eval", worst <= 1e-4, f"5 queries, both gain modes, max |diff| {worst:.2e} (tol 1e-4)")


def _toy_sets():
    a = Dataset(
        "alpha",
        [Document("a1", "solar panels convert light"), Document("a2", "wind turbines"), Document("a3", "solar wind")],
        [Query("q1", "solar light"), Query("q2", "wind")],
        [QrelEntry("q1", "a1", 2), QrelEntry("q1", "a3", 1), QrelEntry("q2", "a2", 1)],
    )
    b = Dataset(
        "beta",
        [Document("b1", "protein folding"), Document("b2", "folding chairs"), Document("b3", "protein diet")],
        [Query("p1", "protein folding"), Query("p2", "chairs")],
        [QrelEntry("p1", "b1", 1), QrelEntry("p2", "b2", 1), QrelEntry("p2", "gone", 1)],
    )
    return [a, b]


def test_fitness_exactness(verdict):
    sets = _toy_sets()
    report = evaluate("bm25", sets)
    means_r, means_n = [], []
    for ds in sets:
        _, _, per_query = evaluate_dataset("bm25", ds)
        means_r.append(sum(m.recall100 for m in per_query.values()) / len(per_query))
        means_n.append(sum(m.ndcg10 for m in per_query.values()) / len(per_query))
    recomputed = 0.8 * (sum(means_r) / len(means_r)) + 0.2 * (sum(means_n) / len(means_n))
    diff = abs(report.fitness - recomputed)
    verdict("fitness exactness", diff <= 1e-12, f"report {report.fitness!r} vs recomputed {recomputed!r}, |diff| {diff:.1e}")


_ORIGINAL_MIGRATE = Population.migrate


def _instrumented_run(steps, seed, monkeypatch):
    snapshots = []
    original = _ORIGINAL_MIGRATE

    def spy(self, step):
        before = {
            i: [(c.id, c.fitness, c.migrated) for c in self.members(i)] for i in range(self.cfg.islands)
        }
        events = original(self, step)
        snapshots.append((step, before, events))
        return events

    monkeypatch.setattr(Population, "migrate", spy)
    buf = io.StringIO()
    result = evolve_loop(
        TOY_SEED_PROGRAM, steps, MarkerMutator(), MarkerCountEvaluator(), EvolveConfig(seed=seed), LineageLog(buf)
    )
    return result, snapshots, buf.getvalue()


def test_evolution_dynamics(verdict, monkeypatch):
    start = time.perf_counter()
    result, snapshots, log_a = _instrumented_run(200, 11, monkeypatch)
    _, _, log_b = _instrumented_run(200, 11, monkeypatch)
    elapsed = time.perf_counter() - start
    problems = []

    traj = [f for _, f in result.trajectory()]
    if any(b < a for a, b in zip(traj, traj[1:])):
        problems.append("best fitness decreased")
    if traj[-1] <= traj[0]:
        problems.append("no improvement")

    # strict replacement: every eviction is by a strictly fitter candidate, and per-cell occupant
    # fitness sequences are strictly increasing
    if any(new <= old for _, _, old, new in result.population.evictions):
        problems.append("non-strict eviction")
    occupants = defaultdict(list)
    for line in log_a.splitlines():
        rec = json.loads(line)
        if rec["type"] == "candidate" and rec["status"] in ("accepted", "evicted"):
            occupants[(rec["island"], tuple(rec["cell"]))].append(rec["fitness"])
    if any(any(b <= a for a, b in zip(seq, seq[1:])) for seq in occupants.values()):
        problems.append("cell occupant sequence not strictly increasing")

    fired = [r.step for r in result.steps if r.migrations]
    if fired != list(range(20, 201, 20)) or [s for s, _, _ in snapshots] != list(range(20, 201, 20)):
        problems.append(f"migration fired at {fired}")
    moved = 0
    for step, before, events in snapshots:
        by_src = defaultdict(list)
        for ev in events:
            by_src[ev.source_island].append(ev)
        for island, members in before.items():
            eligible = sorted((m for m in members if not m[2]), key=lambda m: (-m[1], m[0]))
            n = migrant_count(len(members), 0.15)
            expected = sorted(m[0] for m in eligible[:n])
            evs = by_src.get(island, [])
            sources = sorted({e.source_id for e in evs})
            if sources != expected:
                problems.append(f"step {step} island {island}: migrants {sources} != {expected}")
            for sid in sources:
                dests = sorted(e.dest_island for e in evs if e.source_id == sid)
                if dests != ring_neighbors(island, 3):
                    problems.append(f"step {step}: {sid} went to {dests}")
            moved += len(sources)
    if log_a != log_b:
        problems.append("lineage logs differ between identical runs")
    if elapsed >= 30:
        problems.append(f"too slow: {elapsed:.1f}s")

    verdict(
        "evolution dynamics",
        not problems,
        f"200 steps, best {traj[0]:g} -> {traj[-1]:g} (monotone), "
        f"{len(result.population.evictions)} strict evictions, migration at steps {fired[:3]}...{fired[-1:]}, "
        f"{moved} migrants checked against ceil(0.15*size), reproducible={log_a == log_b}, "
        f"{elapsed:.2f}s for two runs (limit 30s)" + (f"; problems: {problems[:3]}" if problems else ""),
    )


def test_significance_oracle(verdict):
    t, p = paired_ttest([1.0, 2.0, 3.0], [0.0, 0.0, 0.0])
    p_df2 = 2 * scipy.stats.t.sf(t, 2)
    _, p_same = paired_ttest([0.2, 0.5, 0.9], [0.2, 0.5, 0.9])
    ok = abs(t - 3.4641) <= 1e-3 and abs(p - p_df2) <= 1e-9 and p_same == 1.0
    verdict("significance oracle", ok, f"t = {t:.4f} (expected 3.4641), p = {p:.6f} matches df=2, identical runs p = {p_same}")


def test_directional_on_real_dataset(verdict, capsys):
    if not os.environ.get("LEXEVOLVE_BEIR_DIR"):
        with capsys.disabled():
            print("\n[SKIP] directional check on a real dataset: set LEXEVOLVE_BEIR_DIR to a BEIR dataset directory")
        pytest.skip("LEXEVOLVE_BEIR_DIR not set")
    ds = load_dataset(os.environ["LEXEVOLVE_BEIR_DIR"])
    seed = evaluate("bm25", [ds]).fitness
    evolved = evaluate("evolved-bm25", [ds]).fitness
    verdict("directional check on a real dataset", evolved >= seed, f"{ds.name}: evolved {evolved:.4f} vs BM25 {seed:.4f}")
