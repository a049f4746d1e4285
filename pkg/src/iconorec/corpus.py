"""Code-annotated image corpus: ingestion, the IDF/posting-list index,
and top-k recommendation queries.

The index keeps exact postings (code -> documents carrying it) for the
set-overlap methods, and ancestor postings (code -> documents carrying it
or a child/grandchild of it) so hierarchy-method candidate generation
covers every document that can score above zero.  Candidates are then
scored with the exact functions from :mod:`iconorec.similarity`, so the
index never changes a score, only who gets scored.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import IO, Iterable, Union

from .errors import DuplicateImageId, EmptyQuery, FormatError
from .notation import parent, parse, parse_cached
from .similarity import IdfTable, hierarchy_score, idf, idf_overlap, jaccard

log = logging.getLogger(__name__)

Source = Union[str, Path, IO[str]]

METHOD_HIERARCHY = "hierarchy"
METHOD_IDF = "idf"
METHOD_JACCARD = "jaccard"
METHODS = (METHOD_HIERARCHY, METHOD_IDF, METHOD_JACCARD)

INDEX_FORMAT_VERSION = 1


@dataclass(frozen=True)
class CorpusDoc:
    """One corpus image: its filename and the codes assigned to it."""

    image_id: str
    codes: frozenset[str]


@dataclass(frozen=True)
class Recommendation:
    """A scored corpus hit.  ``explanation`` pairs query codes with the
    document codes they matched: (query_code, matched_code, contribution).
    Contributions sum to the score for the hierarchy and idf methods; for
    jaccard they enumerate the shared codes (each worth 1/|union|)."""

    method: str
    image_id: str
    score: float
    explanation: tuple[tuple[str, str, float], ...]

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "image_id": self.image_id,
            "score": self.score,
            "explanation": [
                {"query_code": q, "matched_code": m, "contribution": c}
                for q, m, c in self.explanation
            ],
        }


def split_code_list(text: str, separators: str = ", ") -> list[str]:
    """Split a code list on separators that sit outside brackets, so
    bracket texts containing spaces or commas stay intact."""
    parts: list[str] = []
    buf: list[str] = []
    depth = 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        if ch in separators and depth == 0:
            if buf:
                parts.append("".join(buf).strip())
                buf = []
            continue
        buf.append(ch)
    if buf:
        parts.append("".join(buf).strip())
    return [p for p in parts if p]


def ingest_corpus(source: Source, format: str = "json-map") -> list[CorpusDoc]:
    """Read corpus annotations from a path or stream.

    json-map: one object mapping image filename -> list of code strings
    (the Iconclass AI Test Set annotation layout).  tsv: image_id TAB
    codes separated by spaces (split outside brackets).

    Codes that do not parse are dropped with a warning; documents left
    without codes are skipped with a warning.  Structural problems raise
    :class:`FormatError`.
    """
    if format not in ("json-map", "tsv"):
        raise ValueError(f"unknown corpus format {format!r}")
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return _ingest(fh, format)
    return _ingest(source, format)


def _ingest(stream: IO[str], format: str) -> list[CorpusDoc]:
    if format == "json-map":
        try:
            data = json.load(stream)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise FormatError("corpus must be a JSON object mapping image to codes")
        items = []
        for image_id, codes in data.items():
            if not isinstance(codes, list) or any(
                not isinstance(c, str) for c in codes
            ):
                raise FormatError(f"{image_id!r}: codes must be a list of strings")
            items.append((image_id, codes))
    else:
        items = []
        for lineno, line in enumerate(stream, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise FormatError(
                    f"line {lineno}: expected 2 tab-separated fields, got {len(fields)}"
                )
            items.append((fields[0], split_code_list(fields[1], separators=" ")))

    docs: list[CorpusDoc] = []
    for image_id, codes in items:
        valid: set[str] = set()
        for code in codes:
            try:
                parse(code)
            except Exception as exc:
                log.warning("%s: dropping invalid code %r: %s", image_id, code, exc)
                continue
            valid.add(code)
        if not valid:
            log.warning("%s: skipped, no valid codes", image_id)
            continue
        docs.append(CorpusDoc(image_id=image_id, codes=frozenset(valid)))
    return docs


@lru_cache(maxsize=None)
def _self_parent_grandparent(code: str) -> tuple[str, ...]:
    """The code itself plus up to two ancestors, as rendered strings."""
    notation = parse_cached(code)
    chain = [notation.raw]
    up = parent(notation)
    if up is not None:
        chain.append(up.raw)
        up2 = parent(up)
        if up2 is not None:
            chain.append(up2.raw)
    return tuple(chain)


class CorpusIndex:
    """Immutable retrieval index over a corpus; safe for concurrent reads."""

    def __init__(self, docs: dict[str, CorpusDoc]):
        self.docs = docs
        self.postings: dict[str, set[str]] = {}
        self.ancestor_postings: dict[str, set[str]] = {}
        for image_id, doc in docs.items():
            for code in doc.codes:
                self.postings.setdefault(code, set()).add(image_id)
                for ancestor in _self_parent_grandparent(code):
                    self.ancestor_postings.setdefault(ancestor, set()).add(image_id)
        self.idf = IdfTable(
            n_docs=len(docs),
            doc_freq={code: len(ids) for code, ids in self.postings.items()},
        )

    def __len__(self) -> int:
        return len(self.docs)

    def save(self, path: str | Path) -> None:
        """Write the documents to a self-describing JSON cache; derived
        structures are rebuilt on load, so load == rebuild by
        construction."""
        payload = {
            "format_version": INDEX_FORMAT_VERSION,
            "docs": {
                image_id: sorted(self.docs[image_id].codes)
                for image_id in sorted(self.docs)
            },
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")


def build_index(docs: Iterable[CorpusDoc]) -> CorpusIndex:
    """Index a document list; image ids must be unique."""
    by_id: dict[str, CorpusDoc] = {}
    for doc in docs:
        if doc.image_id in by_id:
            raise DuplicateImageId(doc.image_id)
        by_id[doc.image_id] = doc
    return CorpusIndex(by_id)


def load_index(path: str | Path) -> CorpusIndex:
    """Load an index cache written by :meth:`CorpusIndex.save`; rejects
    unknown format versions."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid index cache: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format_version") != INDEX_FORMAT_VERSION:
        raise FormatError(
            f"index cache format version {payload.get('format_version')!r} "
            f"not supported (expected {INDEX_FORMAT_VERSION})"
        )
    docs_obj = payload.get("docs")
    if not isinstance(docs_obj, dict):
        raise FormatError("index cache missing 'docs' object")
    return build_index(
        CorpusDoc(image_id=image_id, codes=frozenset(codes))
        for image_id, codes in docs_obj.items()
    )


def recommend(
    q: set[str],
    idx: CorpusIndex,
    method: str,
    k: int = 1,
    impact: float = 1.0,
    exclude: str | None = None,
) -> list[Recommendation]:
    """Top-k corpus documents for a query code set under one method.

    Candidates come from the posting lists (exact postings for the
    set-overlap methods; self/parent/grandparent ancestor postings for
    the hierarchy method, which provably covers every nonzero-scoring
    document).  Zero scores are dropped; ties break on ascending
    image_id.  ``exclude`` removes the query image itself when the query
    comes from inside the corpus.
    """
    if not q:
        raise EmptyQuery("query code set is empty")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if k < 1:
        raise ValueError("k must be >= 1")

    candidates: set[str] = set()
    if method == METHOD_HIERARCHY:
        for code in q:
            for key in _self_parent_grandparent(code):
                candidates |= idx.ancestor_postings.get(key, set())
    else:
        for code in q:
            candidates |= idx.postings.get(code, set())
    if exclude is not None:
        candidates.discard(exclude)

    scored: list[tuple[float, str]] = []
    for image_id in candidates:
        doc_codes = idx.docs[image_id].codes
        if method == METHOD_HIERARCHY:
            score = hierarchy_score(q, doc_codes)
        elif method == METHOD_IDF:
            score = idf_overlap(q, doc_codes, idx.idf, impact)
        else:
            score = jaccard(q, doc_codes)
        if score > 0.0:
            scored.append((score, image_id))
    scored.sort(key=lambda t: (-t[0], t[1]))
    # Explanations are only materialized for the hits that survive top-k.
    return [
        Recommendation(
            method=method,
            image_id=image_id,
            score=score,
            explanation=_explain(method, q, idx.docs[image_id].codes, idx.idf, impact),
        )
        for score, image_id in scored[:k]
    ]


def recommend_all(
    q: set[str],
    idx: CorpusIndex,
    impact: float = 1.0,
    exclude: str | None = None,
) -> dict[str, Recommendation | None]:
    """Top-1 document per method; None where a method finds nothing with
    a positive score."""
    out: dict[str, Recommendation | None] = {}
    for method in METHODS:
        hits = recommend(q, idx, method, k=1, impact=impact, exclude=exclude)
        out[method] = hits[0] if hits else None
    return out


def _explain(
    method: str,
    q: set[str],
    doc_codes: set[str],
    table: IdfTable,
    impact: float,
) -> tuple[tuple[str, str, float], ...]:
    if method == METHOD_HIERARCHY:
        from .notation import hierarchy_relation

        pairs = []
        for qc in sorted(q):
            qn = parse_cached(qc)
            for dc in sorted(doc_codes):
                rel = hierarchy_relation(qn, parse_cached(dc))
                if rel > 0.0:
                    pairs.append((qc, dc, rel))
        return tuple(pairs)
    shared = sorted(q & doc_codes)
    if method == METHOD_IDF:
        return tuple(
            (c, c, idf(table, c) ** impact) for c in shared if c in table.doc_freq
        )
    union = len(q | doc_codes)
    return tuple((c, c, 1.0 / union) for c in shared)
