"""Per-channel inverted indexes and collection statistics."""

from __future__ import annotations

import io
import os
import struct
import time
from array import array
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

from .corpus import Document
from .tokenize import TokenChannel, tokenize_channels

INDEX_MAGIC = b"LXIDX\x00"
INDEX_VERSION = 1


class EmptyCorpusError(ValueError):
    """Scoring was requested against an index with no documents."""


class IndexFormatError(ValueError):
    pass


class Posting(NamedTuple):
    doc: int
    tf: int


@dataclass
class CollectionStats:
    n_docs: int
    avgdl: float
    total_tokens: int
    df: dict[str, int]
    ctf: dict[str, int]

    def p_collection(self, term: str) -> float:
        """Maximum-likelihood collection probability ctf(t) / |C|."""
        if self.total_tokens == 0:
            return 0.0
        return self.ctf.get(term, 0) / self.total_tokens


@dataclass
class ChannelIndex:
    channel: TokenChannel
    doc_ids: list[str]
    postings: dict[str, list[Posting]]
    doc_lengths: list[int]
    stats: CollectionStats
    build_seconds: float = field(default=0.0, compare=False)
    _tf_cache: dict[str, dict[int, int]] = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_docs(self) -> int:
        return self.stats.n_docs

    def vocabulary(self) -> list[str]:
        return sorted(self.postings)

    def tf_map(self, term: str) -> dict[int, int]:
        """doc ordinal -> tf for ``term`` (empty for unseen terms)."""
        m = self._tf_cache.get(term)
        if m is None:
            m = {p.doc: p.tf for p in self.postings.get(term, ())}
            self._tf_cache[term] = m
        return m

    def require_docs(self) -> None:
        if self.stats.n_docs == 0:
            raise EmptyCorpusError("cannot score against an empty corpus")

    def audit(self) -> None:
        """Check the structural invariants; raises AssertionError on violation."""
        s = self.stats
        assert len(self.doc_lengths) == s.n_docs == len(self.doc_ids)
        assert sum(self.doc_lengths) == s.total_tokens
        assert sum(s.ctf.values()) == s.total_tokens
        for term, plist in self.postings.items():
            assert len(plist) == s.df[term], term
            assert sum(p.tf for p in plist) == s.ctf[term], term
            assert all(p.tf >= 1 for p in plist), term
            assert all(a.doc < b.doc for a, b in zip(plist, plist[1:])), term
            assert 1 <= s.df[term] <= s.n_docs
        if s.n_docs:
            assert abs(s.avgdl - s.total_tokens / s.n_docs) < 1e-12


def _assemble(channel: TokenChannel, doc_ids: list[str], doc_counts: Sequence[Counter]) -> ChannelIndex:
    postings: dict[str, list[Posting]] = {}
    doc_lengths: list[int] = []
    for ordinal, counts in enumerate(doc_counts):
        doc_lengths.append(sum(counts.values()))
        for term, tf in counts.items():
            postings.setdefault(term, []).append(Posting(ordinal, tf))
    postings = {t: postings[t] for t in sorted(postings)}
    df = {t: len(p) for t, p in postings.items()}
    ctf = {t: sum(x.tf for x in p) for t, p in postings.items()}
    n = len(doc_lengths)
    total = sum(doc_lengths)
    stats = CollectionStats(n_docs=n, avgdl=total / n if n else 0.0, total_tokens=total, df=df, ctf=ctf)
    return ChannelIndex(channel, list(doc_ids), postings, doc_lengths, stats)


def build_indexes(
    documents: Sequence[Document], channels: Iterable[TokenChannel | str]
) -> dict[TokenChannel, ChannelIndex]:
    """Build several channel indexes in one tokenization pass.

    ``build_seconds`` on each index is the shared wall-clock build time.
    """
    channels = [TokenChannel(c) for c in channels]
    start = time.perf_counter()
    per_channel: dict[TokenChannel, list[Counter]] = {c: [] for c in channels}
    for doc in documents:
        streams = tokenize_channels(doc.indexed_text, channels)
        for c in channels:
            per_channel[c].append(Counter(streams[c].tokens))
    doc_ids = [d.id for d in documents]
    out = {c: _assemble(c, doc_ids, per_channel[c]) for c in channels}
    elapsed = time.perf_counter() - start
    for idx in out.values():
        idx.build_seconds = elapsed
    return out


def build_index(documents: Sequence[Document], channel: TokenChannel | str = TokenChannel.BASE) -> ChannelIndex:
    channel = TokenChannel(channel)
    return build_indexes(documents, [channel])[channel]


@dataclass
class QueryRep:
    """Per-channel query term multiset (term -> qtf)."""

    terms: dict[TokenChannel, Counter] = field(default_factory=dict)

    def __getitem__(self, channel: TokenChannel | str) -> Counter:
        return self.terms.get(TokenChannel(channel), Counter())

    def channels(self) -> list[TokenChannel]:
        return list(self.terms)

    def is_empty(self) -> bool:
        return not any(self.terms.values())


def represent_query(text: str, channels: Iterable[TokenChannel | str] = (TokenChannel.BASE,)) -> QueryRep:
    streams = tokenize_channels(text, channels)
    return QueryRep({c: Counter(s.tokens) for c, s in streams.items()})


def candidate_docs(
    index: ChannelIndex | Mapping[TokenChannel, ChannelIndex], rep: QueryRep
) -> set[int]:
    """Ordinals of documents that contain at least one query term in any channel."""
    if isinstance(index, ChannelIndex):
        indexes = {index.channel: index}
    else:
        indexes = dict(index)
    out: set[int] = set()
    for channel, counts in rep.terms.items():
        idx = indexes.get(channel)
        if idx is None:
            continue
        for term in counts:
            out.update(p.doc for p in idx.postings.get(term, ()))
    return out


# --- serialization ----------------------------------------------------------


def _put_str(buf: io.BytesIO, s: str) -> None:
    b = s.encode("utf-8")
    buf.write(struct.pack("<I", len(b)))
    buf.write(b)


def _get_str(buf: io.BytesIO) -> str:
    (n,) = struct.unpack("<I", buf.read(4))
    return buf.read(n).decode("utf-8")


def serialize_index(index: ChannelIndex) -> bytes:
    buf = io.BytesIO()
    buf.write(INDEX_MAGIC)
    buf.write(struct.pack("<H", INDEX_VERSION))
    _put_str(buf, index.channel.value)
    buf.write(struct.pack("<I", index.n_docs))
    for doc_id in index.doc_ids:
        _put_str(buf, doc_id)
    buf.write(array("I", index.doc_lengths).tobytes() if index.doc_lengths else b"")
    buf.write(struct.pack("<I", len(index.postings)))
    for term in sorted(index.postings):
        plist = index.postings[term]
        _put_str(buf, term)
        buf.write(struct.pack("<I", len(plist)))
        flat = array("I")
        for p in plist:
            flat.append(p.doc)
            flat.append(p.tf)
        buf.write(flat.tobytes())
    return buf.getvalue()


def deserialize_index(data: bytes) -> ChannelIndex:
    buf = io.BytesIO(data)
    if buf.read(len(INDEX_MAGIC)) != INDEX_MAGIC:
        raise IndexFormatError("not an index file (bad magic)")
    (version,) = struct.unpack("<H", buf.read(2))
    if version != INDEX_VERSION:
        raise IndexFormatError(f"unsupported index version {version}")
    channel = TokenChannel(_get_str(buf))
    (n,) = struct.unpack("<I", buf.read(4))
    doc_ids = [_get_str(buf) for _ in range(n)]
    lengths = array("I")
    lengths.frombytes(buf.read(4 * n))
    (n_terms,) = struct.unpack("<I", buf.read(4))
    doc_counts: list[Counter] = [Counter() for _ in range(n)]
    for _ in range(n_terms):
        term = _get_str(buf)
        (k,) = struct.unpack("<I", buf.read(4))
        flat = array("I")
        flat.frombytes(buf.read(8 * k))
        for i in range(0, 2 * k, 2):
            doc_counts[flat[i]][term] = flat[i + 1]
    idx = _assemble(channel, doc_ids, doc_counts)
    if idx.doc_lengths != list(lengths):
        raise IndexFormatError("document lengths do not match postings")
    return idx


def save_index(index: ChannelIndex, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_index(index))


def load_index(path: str | os.PathLike) -> ChannelIndex:
    with open(path, "rb") as fh:
        return deserialize_index(fh.read())
