import random

import pytest
from hypothesis import strategies as st

from lexevolve.corpus import Dataset, Document, QrelEntry, Query

VOCAB = [f"w{i}" for i in range(20)]


def random_corpus(rng: random.Random, max_docs: int = 50, vocab_size: int = 20, max_len: int = 30):
    """Documents over a small vocabulary; every document has at least one token."""
    vocab = VOCAB[:vocab_size]
    n = rng.randint(1, max_docs)
    docs = []
    for i in range(n):
        length = rng.randint(1, max_len)
        docs.append(Document(f"d{i:03d}", " ".join(rng.choice(vocab) for _ in range(length))))
    return docs


def random_query(rng: random.Random, vocab_size: int = 20, max_terms: int = 5, oov_rate: float = 0.1) -> str:
    words = []
    for _ in range(rng.randint(1, max_terms)):
        words.append("zzz" if rng.random() < oov_rate else rng.choice(VOCAB[:vocab_size]))
    return " ".join(words)


token_text = st.lists(st.sampled_from(VOCAB[:8]), min_size=1, max_size=12).map(" ".join)
corpora = st.lists(token_text, min_size=1, max_size=12).map(
    lambda texts: [Document(f"d{i:02d}", t) for i, t in enumerate(texts)]
)
queries = st.lists(st.sampled_from(VOCAB[:10]), min_size=1, max_size=5).map(" ".join)


@pytest.fixture
def toy_dataset() -> Dataset:
    docs = [
        Document("d1", "the cat sat on the mat", title="Cats"),
        Document("d2", "dogs chase cats in the park"),
        Document("d3", "information retrieval ranks documents by relevance"),
        Document("d4", "retrieval models such as bm25 and query likelihood"),
        Document("d5", "the mat was red"),
    ]
    qs = [Query("q1", "cat mat"), Query("q2", "retrieval models"), Query("q3", "dogs park")]
    qrels = [
        QrelEntry("q1", "d1", 2),
        QrelEntry("q1", "d5", 1),
        QrelEntry("q2", "d4", 2),
        QrelEntry("q2", "d3", 1),
        QrelEntry("q3", "d2", 1),
        QrelEntry("q3", "missing-doc", 1),
    ]
    return Dataset("toy", docs, qs, qrels)
