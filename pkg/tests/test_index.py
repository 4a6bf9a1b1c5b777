import pytest
from hypothesis import given, settings

from conftest import corpora, queries
from lexevolve.corpus import Document
from lexevolve.index import (
    IndexFormatError,
    build_index,
    build_indexes,
    candidate_docs,
    deserialize_index,
    load_index,
    represent_query,
    save_index,
    serialize_index,
)
from lexevolve.tokenize import ALL_CHANNELS, TokenChannel


def docs(*texts):
    return [Document(f"d{i}", t) for i, t in enumerate(texts)]


def test_counts_by_hand():
    idx = build_index(docs("a b b", "a c"))
    s = idx.stats
    assert (s.df["a"], s.df["b"], s.ctf["b"]) == (2, 1, 2)
    assert s.avgdl == 2.5
    assert idx.doc_lengths == [3, 2]
    idx.audit()


def test_empty_corpus():
    idx = build_index([])
    assert idx.stats.n_docs == 0 and idx.postings == {} and idx.stats.avgdl == 0.0


def test_single_doc():
    idx = build_index(docs("x"))
    assert (idx.stats.n_docs, idx.stats.df["x"], idx.stats.avgdl) == (1, 1, 1.0)


def test_channel_lengths_use_channel_tokens():
    idx = build_index(docs("abcde fg"), TokenChannel.MICRO)
    assert idx.doc_lengths == [4]  # abc bcd cde fg


def test_represent_query():
    assert dict(represent_query("cat cat dog")[TokenChannel.BASE]) == {"cat": 2, "dog": 1}
    assert represent_query("", ALL_CHANNELS).is_empty()
    assert dict(represent_query("cats", [TokenChannel.MICRO])[TokenChannel.MICRO]) == {"cat": 1, "ats": 1}


def test_candidate_docs():
    idx = build_index(docs("a b", "b c", "c d", "b"))
    assert candidate_docs(idx, represent_query("zzz")) == set()
    assert candidate_docs(idx, represent_query("b")) == {0, 1, 3}
    assert candidate_docs(idx, represent_query("a c")) == {0, 1, 2}


def test_candidate_docs_across_channels():
    indexes = build_indexes(docs("retrieval", "retrieve", "other"), ALL_CHANNELS)
    rep = represent_query("retrieving", ALL_CHANNELS)
    assert candidate_docs(indexes[TokenChannel.BASE], rep) == set()
    assert candidate_docs(indexes, rep) == {0, 1}


def test_serialization_roundtrip(tmp_path):
    idx = build_index(docs("a b b", "a c", "Ünï code"))
    save_index(idx, tmp_path / "x.idx")
    back = load_index(tmp_path / "x.idx")
    assert back == idx
    assert serialize_index(back) == serialize_index(idx)


def test_bad_magic():
    with pytest.raises(IndexFormatError):
        deserialize_index(b"nope")


@settings(max_examples=60)
@given(corpora)
def test_audit_and_determinism(corpus):
    for channel in ALL_CHANNELS:
        idx = build_index(corpus, channel)
        idx.audit()
        assert serialize_index(build_index(corpus, channel)) == serialize_index(idx)
        assert deserialize_index(serialize_index(idx)) == idx


@settings(max_examples=60)
@given(corpora, queries)
def test_candidates_are_exactly_matching_docs(corpus, q):
    idx = build_index(corpus)
    terms = set(q.split())
    expected = {i for i, d in enumerate(corpus) if terms & set(d.text.split())}
    assert candidate_docs(idx, represent_query(q)) == expected
