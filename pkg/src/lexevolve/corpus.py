"""BEIR-format dataset loading and TREC run-file writing."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator


class CorpusFormatError(ValueError):
    """Raised for malformed corpus, query, qrels or run files."""


class DuplicateIdError(CorpusFormatError):
    pass


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    title: str = ""

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusFormatError("document id must be non-empty")

    @property
    def indexed_text(self) -> str:
        """Text fed to the tokenizer: title and body joined when a title exists."""
        if self.title:
            return f"{self.title} {self.text}"
        return self.text


@dataclass(frozen=True)
class Query:
    id: str
    text: str

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusFormatError("query id must be non-empty")


@dataclass(frozen=True)
class QrelEntry:
    query_id: str
    doc_id: str
    grade: int

    def __post_init__(self) -> None:
        if self.grade < 0:
            raise CorpusFormatError(f"negative grade {self.grade} for ({self.query_id}, {self.doc_id})")


@dataclass
class Dataset:
    name: str
    documents: list[Document]
    queries: list[Query]
    qrels: list[QrelEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        query_ids = {q.id for q in self.queries}
        stray = sorted({e.query_id for e in self.qrels} - query_ids)
        if stray:
            raise CorpusFormatError(f"qrels reference unknown queries: {stray[:5]}")

    def qrels_by_query(self) -> dict[str, dict[str, int]]:
        return qrels_to_dict(self.qrels)


def qrels_to_dict(qrels: Iterable[QrelEntry]) -> dict[str, dict[str, int]]:
    out: dict[str, dict[str, int]] = {}
    for e in qrels:
        out.setdefault(e.query_id, {})[e.doc_id] = e.grade
    return out


def _read_utf8_lines(path: str | os.PathLike) -> Iterator[tuple[int, str]]:
    # Strict decoding: invalid UTF-8 raises UnicodeDecodeError.
    with open(path, "r", encoding="utf-8", errors="strict", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            yield lineno, line


def _iter_jsonl(path: str | os.PathLike) -> Iterator[tuple[int, dict]]:
    for lineno, line in _read_utf8_lines(path):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{path}:{lineno}: malformed JSON: {exc.msg}") from exc
        if not isinstance(obj, dict) or "_id" not in obj:
            raise CorpusFormatError(f"{path}:{lineno}: expected an object with an '_id' key")
        yield lineno, obj


def load_corpus(path: str | os.PathLike) -> list[Document]:
    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, obj in _iter_jsonl(path):
        doc_id = str(obj["_id"])
        if doc_id in seen:
            raise DuplicateIdError(f"{path}:{lineno}: duplicate document id {doc_id!r}")
        seen.add(doc_id)
        docs.append(Document(id=doc_id, text=obj.get("text") or "", title=obj.get("title") or ""))
    return docs


def load_queries(path: str | os.PathLike) -> list[Query]:
    queries: list[Query] = []
    seen: set[str] = set()
    for lineno, obj in _iter_jsonl(path):
        qid = str(obj["_id"])
        if qid in seen:
            raise DuplicateIdError(f"{path}:{lineno}: duplicate query id {qid!r}")
        seen.add(qid)
        queries.append(Query(id=qid, text=obj.get("text") or ""))
    return queries


QRELS_HEADER = ("query-id", "corpus-id", "score")


def load_qrels(path: str | os.PathLike) -> list[QrelEntry]:
    lines = _read_utf8_lines(path)
    first = next(lines, None)
    if first is None or tuple(first[1].rstrip("\r\n").split("\t")) != QRELS_HEADER:
        raise CorpusFormatError(f"{path}: missing header 'query-id\\tcorpus-id\\tscore'")
    entries: list[QrelEntry] = []
    seen: set[tuple[str, str]] = set()
    for lineno, line in lines:
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise CorpusFormatError(f"{path}:{lineno}: expected 3 tab-separated columns")
        qid, did, grade_s = parts
        try:
            grade = int(grade_s)
        except ValueError as exc:
            raise CorpusFormatError(f"{path}:{lineno}: non-integer grade {grade_s!r}") from exc
        if (qid, did) in seen:
            raise DuplicateIdError(f"{path}:{lineno}: duplicate judgment ({qid}, {did})")
        seen.add((qid, did))
        entries.append(QrelEntry(qid, did, grade))
    return entries


def load_dataset(root: str | os.PathLike, split: str = "test", name: str | None = None) -> Dataset:
    """Load a BEIR dataset directory (corpus.jsonl, queries.jsonl, qrels/<split>.tsv).

    Only queries that have judgments in the split are kept, as BEIR does.
    """
    root = Path(root)
    documents = load_corpus(root / "corpus.jsonl")
    queries = load_queries(root / "queries.jsonl")
    qrels = load_qrels(root / "qrels" / f"{split}.tsv")
    judged = {e.query_id for e in qrels}
    queries = [q for q in queries if q.id in judged]
    return Dataset(name=name or root.name, documents=documents, queries=queries, qrels=qrels)


def write_corpus(documents: Iterable[Document], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in documents:
            fh.write(json.dumps({"_id": d.id, "title": d.title, "text": d.text}, ensure_ascii=False) + "\n")


def write_queries(queries: Iterable[Query], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for q in queries:
            fh.write(json.dumps({"_id": q.id, "text": q.text}, ensure_ascii=False) + "\n")


def write_qrels(qrels: Iterable[QrelEntry], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(QRELS_HEADER)
        for e in qrels:
            w.writerow((e.query_id, e.doc_id, e.grade))


def write_dataset(dataset: Dataset, root: str | os.PathLike, split: str = "test") -> Path:
    root = Path(root)
    (root / "qrels").mkdir(parents=True, exist_ok=True)
    write_corpus(dataset.documents, root / "corpus.jsonl")
    write_queries(dataset.queries, root / "queries.jsonl")
    write_qrels(dataset.qrels, root / "qrels" / f"{split}.tsv")
    return root


# --- run files -------------------------------------------------------------


@dataclass
class ScoredRun:
    """Ranked (doc_id, score) lists keyed by query id."""

    rankings: dict[str, list[tuple[str, float]]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rankings)

    def doc_ids(self, query_id: str) -> list[str]:
        return [d for d, _ in self.rankings.get(query_id, [])]


def write_run(run: ScoredRun, tag: str, path: str | os.PathLike, cutoff: int | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for qid, ranking in run.rankings.items():
            if cutoff is not None:
                ranking = ranking[:cutoff]
            for rank, (doc_id, score) in enumerate(ranking, start=1):
                fh.write(f"{qid} Q0 {doc_id} {rank} {score!r} {tag}\n")


def read_run(path: str | os.PathLike) -> ScoredRun:
    """Read a six-column TREC run; rankings are re-sorted by descending score."""
    rankings: dict[str, list[tuple[str, float]]] = {}
    for lineno, line in _read_utf8_lines(path):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 6:
            raise CorpusFormatError(f"{path}:{lineno}: expected 6 columns, got {len(parts)}")
        qid, _, doc_id, _, score, _ = parts
        try:
            rankings.setdefault(qid, []).append((doc_id, float(score)))
        except ValueError as exc:
            raise CorpusFormatError(f"{path}:{lineno}: bad score {score!r}") from exc
    for qid, ranking in rankings.items():
        ranking.sort(key=lambda p: (-p[1], p[0]))
    return ScoredRun(rankings)
