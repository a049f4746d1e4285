"""The Iconclass concept vocabulary: notation, display text and keywords,
with the inverted indexes the matcher queries.

Two small record formats are supported (see ``docs/data_formats.md``):
JSONL with one ``{"notation", "text", "keywords"[, "lang"]}`` object per
line, and TSV with ``notation TAB text TAB comma-separated keywords``.
The repository ships desk-scale fixtures; the official data dump can be
converted to the same JSONL layout.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import IO, Iterable, Iterator, Union

from .errors import FormatError
from .notation import Notation, parse

log = logging.getLogger(__name__)

Source = Union[str, Path, IO[str]]


@dataclass(frozen=True)
class VocabEntry:
    """One concept: a notation, its English display text, and the set of
    lowercase index keywords attached to it."""

    notation: Notation
    text: str
    keywords: frozenset[str]


class Vocabulary:
    """Immutable concept store plus keyword and keyword-set indexes.

    ``keyword_index`` maps each keyword to the codes carrying it;
    ``keyword_set_index`` maps a full keyword set to the codes whose
    keywords equal it exactly.  Both are derived purely from ``entries``.
    All queries are read-only and safe to run concurrently.
    """

    def __init__(self, entries: Iterable[VocabEntry], skipped: int = 0):
        self.entries: dict[str, VocabEntry] = {}
        self.keyword_index: dict[str, set[str]] = {}
        self.keyword_set_index: dict[frozenset[str], set[str]] = {}
        self.skipped = skipped
        for entry in entries:
            code = entry.notation.raw
            if code in self.entries:
                raise FormatError(f"duplicate notation {code!r} in vocabulary")
            self.entries[code] = entry
            for kw in entry.keywords:
                self.keyword_index.setdefault(kw, set()).add(code)
            self.keyword_set_index.setdefault(entry.keywords, set()).add(code)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, code: str) -> bool:
        return code in self.entries

    def text_of(self, code: str) -> str | None:
        entry = self.entries.get(code)
        return entry.text if entry is not None else None

    def codes_with_keyword_set(self, keywords: set[str]) -> set[str]:
        """Codes whose keyword set equals ``keywords`` exactly."""
        if not keywords:
            raise ValueError("keyword set must be non-empty")
        return set(self.keyword_set_index.get(frozenset(keywords), ()))

    def codes_with_keywords_superset(self, keywords: set[str]) -> set[str]:
        """Codes whose keyword set contains every keyword in ``keywords``."""
        if not keywords:
            raise ValueError("keyword set must be non-empty")
        postings = [self.keyword_index.get(kw) for kw in keywords]
        if any(p is None for p in postings):
            return set()
        postings.sort(key=len)
        result = set(postings[0])
        for p in postings[1:]:
            result &= p
            if not result:
                break
        return result

    def codes_with_keyword(self, label: str) -> set[str]:
        """Codes carrying ``label`` among their keywords."""
        return set(self.keyword_index.get(label, ()))

    def codes_with_text_containing(self, term: str) -> set[str]:
        """Codes whose display text contains ``term`` as a whole word,
        case-insensitively ("dog" matches "dog (as messenger)" but not
        "dogma" or "dogs")."""
        if not term:
            raise ValueError("search term must be non-empty")
        pattern = _word_pattern(term.lower())
        return {
            code
            for code, entry in self.entries.items()
            if pattern.search(entry.text.lower())
        }


@lru_cache(maxsize=4096)
def _word_pattern(term_lower: str) -> re.Pattern[str]:
    return re.compile(rf"(?<!\w){re.escape(term_lower)}(?!\w)")


def contains_word(text: str, term: str) -> bool:
    """Whole-word, case-insensitive containment; the same rule the
    description search and the shortest-title reducer use."""
    return _word_pattern(term.lower()).search(text.lower()) is not None


def normalize_keywords(raw: Iterable[str]) -> frozenset[str]:
    return frozenset(kw.strip().lower() for kw in raw if kw.strip())


def load_vocabulary(source: Source, format: str = "jsonl") -> Vocabulary:
    """Load concept records from a path or text stream.

    Records whose notation does not parse are skipped with a warning; a
    repeated notation replaces the earlier record (last one wins, with a
    warning).  The resulting ``Vocabulary.skipped`` counts records that
    did not make it in.  Structurally broken records (invalid JSON, wrong
    column count, missing fields) raise :class:`FormatError`.
    """
    if format not in ("jsonl", "tsv"):
        raise ValueError(f"unknown vocabulary format {format!r}")
    with _open_text(source) as stream:
        records = _parse_jsonl(stream) if format == "jsonl" else _parse_tsv(stream)
        by_code: dict[str, VocabEntry] = {}
        skipped = 0
        for lineno, code, text, keywords in records:
            try:
                notation = parse(code)
            except Exception as exc:
                log.warning("line %d: skipping record %r: %s", lineno, code, exc)
                skipped += 1
                continue
            if notation.raw in by_code:
                log.warning(
                    "line %d: duplicate notation %r, keeping the later record",
                    lineno,
                    notation.raw,
                )
                skipped += 1
            by_code[notation.raw] = VocabEntry(
                notation=notation, text=text, keywords=normalize_keywords(keywords)
            )
    vocab = Vocabulary(by_code.values(), skipped=skipped)
    if skipped:
        log.warning("vocabulary load skipped %d record(s)", skipped)
    return vocab


def _parse_jsonl(stream: IO[str]) -> Iterator[tuple[int, str, str, list[str]]]:
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise FormatError(f"line {lineno}: record is not an object")
        missing = {"notation", "text", "keywords"} - obj.keys()
        if missing:
            raise FormatError(f"line {lineno}: missing field(s) {sorted(missing)}")
        if not isinstance(obj["notation"], str) or not isinstance(obj["text"], str):
            raise FormatError(f"line {lineno}: notation and text must be strings")
        keywords = obj["keywords"]
        if not isinstance(keywords, list) or any(
            not isinstance(k, str) for k in keywords
        ):
            raise FormatError(f"line {lineno}: keywords must be a list of strings")
        yield lineno, obj["notation"], obj["text"], keywords


def _parse_tsv(stream: IO[str]) -> Iterator[tuple[int, str, str, list[str]]]:
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise FormatError(
                f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}"
            )
        code, text, kw_field = fields
        keywords = [k for k in kw_field.split(",") if k.strip()]
        yield lineno, code, text, keywords


def _open_text(source: Source):
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8")
    # Already a stream; wrap so the caller keeps ownership of its handle.
    return _NonClosing(source)


class _NonClosing:
    def __init__(self, stream: IO[str]):
        self._stream = stream

    def __enter__(self) -> IO[str]:
        return self._stream

    def __exit__(self, *exc_info) -> None:
        pass
