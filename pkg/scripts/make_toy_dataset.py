"""Write a small synthetic BEIR-style dataset (corpus.jsonl, queries.jsonl, qrels/test.tsv).

Documents are drawn from topic-specific vocabularies mixed with shared
background words; each query names a few words of one topic and judges the
documents of that topic, graded by how many query words they contain.

    python scripts/make_toy_dataset.py data/toy --docs 400 --queries 30 --seed 0
"""

import argparse
import random

from lexevolve.corpus import Dataset, Document, QrelEntry, Query, write_dataset

SUFFIXES = ["", "s", "ing", "ed", "ation"]


def make_dataset(n_docs: int, n_queries: int, n_topics: int, seed: int) -> Dataset:
    rng = random.Random(seed)
    background = [f"common{i}" for i in range(60)]
    topics = [[f"t{k}w{i}" for i in range(25)] for k in range(n_topics)]

    docs, doc_topic, doc_stems = [], [], []
    for i in range(n_docs):
        k = rng.randrange(n_topics)
        title = rng.choice(topics[k])
        stems = {title}
        words = []
        for _ in range(rng.randint(8, 80)):
            if rng.random() < 0.45:
                stem = rng.choice(topics[k])
                stems.add(stem)
                words.append(stem + rng.choice(SUFFIXES))
            else:
                words.append(rng.choice(background))
        docs.append(Document(f"doc{i:05d}", " ".join(words), title=title))
        doc_topic.append(k)
        doc_stems.append(stems)

    queries, qrels = [], []
    for j in range(n_queries):
        k = rng.randrange(n_topics)
        terms = rng.sample(topics[k], rng.randint(1, 4))
        qid = f"q{j:03d}"
        queries.append(Query(qid, " ".join(terms)))
        for doc, topic, stems in zip(docs, doc_topic, doc_stems):
            if topic != k:
                continue
            hits = len(stems.intersection(terms))
            if hits:
                qrels.append(QrelEntry(qid, doc.id, 2 if hits * 2 > len(terms) else 1))
    judged = {q.query_id for q in qrels}
    queries = [q for q in queries if q.id in judged]
    return Dataset("toy", docs, queries, qrels)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out")
    ap.add_argument("--docs", type=int, default=400)
    ap.add_argument("--queries", type=int, default=30)
    ap.add_argument("--topics", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    ds = make_dataset(args.docs, args.queries, args.topics, args.seed)
    write_dataset(ds, args.out)
    print(f"wrote {len(ds.documents)} docs, {len(ds.queries)} queries, {len(ds.qrels)} judgments to {args.out}")


if __name__ == "__main__":
    main()
