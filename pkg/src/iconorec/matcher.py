"""Label-to-code matching.

Detected object labels are matched against vocabulary keywords with a
three-pass relaxation: exact keyword-set match first, then subset match,
then an optional per-label singleton search that deliberately
over-generates.  A text-based variant searches code descriptions
instead.  Three deterministic reducers shrink over-generated code sets:
set intersection of the two mapping routes, a shortest-title heuristic,
and an external selector subprocess (the hook for generative selectors,
which are never allowed to introduce codes of their own).
"""

from __future__ import annotations

import json
import logging
import shlex
import subprocess
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .errors import EmptyLabelSet, ExternalCommandFailure, FormatError
from .vocabulary import Vocabulary, contains_word

log = logging.getLogger(__name__)

PASS_EXACT = "exact"
PASS_SUBSET = "subset"
PASS_NONE = "none"

CommandSpec = Union[str, Sequence[str]]


@dataclass(frozen=True)
class Detection:
    """One detector hit: class label, confidence in [0, 1], and an
    ``[x, y, w, h]`` pixel box."""

    label: str
    confidence: float
    bbox: tuple[float, float, float, float]


@dataclass(frozen=True)
class LabelDocument:
    """Deduplicated object labels for one image; the detector output
    contract.  Labels are stored lowercase; per-instance detections are
    optional and their labels must appear in ``labels``."""

    image_id: str
    labels: frozenset[str]
    detections: tuple[Detection, ...] | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "labels", frozenset(l.strip().lower() for l in self.labels)
        )
        if self.detections is not None:
            for det in self.detections:
                if det.label.lower() not in self.labels:
                    raise FormatError(
                        f"detection label {det.label!r} not in document labels"
                    )

    @classmethod
    def from_json(cls, obj: dict) -> "LabelDocument":
        if not isinstance(obj, dict):
            raise FormatError("label document must be a JSON object")
        missing = {"image_id", "labels"} - obj.keys()
        if missing:
            raise FormatError(f"label document missing field(s) {sorted(missing)}")
        labels = obj["labels"]
        if not isinstance(labels, list) or any(
            not isinstance(l, str) for l in labels
        ):
            raise FormatError("'labels' must be a list of strings")
        detections = None
        if obj.get("detections") is not None:
            raw = obj["detections"]
            if not isinstance(raw, list):
                raise FormatError("'detections' must be a list")
            detections = tuple(_detection_from_json(d) for d in raw)
        return cls(
            image_id=str(obj["image_id"]),
            labels=frozenset(labels),
            detections=detections,
        )

    def to_json(self) -> dict:
        out: dict = {"image_id": self.image_id, "labels": sorted(self.labels)}
        if self.detections is not None:
            out["detections"] = [
                {
                    "label": d.label,
                    "confidence": d.confidence,
                    "bbox": list(d.bbox),
                }
                for d in self.detections
            ]
        return out


def _detection_from_json(obj) -> Detection:
    if not isinstance(obj, dict):
        raise FormatError("detection must be a JSON object")
    missing = {"label", "confidence", "bbox"} - obj.keys()
    if missing:
        raise FormatError(f"detection missing field(s) {sorted(missing)}")
    bbox = obj["bbox"]
    if not isinstance(bbox, list) or len(bbox) != 4:
        raise FormatError("'bbox' must be a list of four numbers")
    return Detection(
        label=str(obj["label"]).strip().lower(),
        confidence=float(obj["confidence"]),
        bbox=tuple(float(v) for v in bbox),
    )


@dataclass
class MatchResult:
    """Outcome of the keyword mapping: the matched codes, which pass
    produced them, and (when the singleton pass ran) the per-label code
    sets it added."""

    codes: set[str]
    pass_used: str
    singleton_codes: dict[str, set[str]] | None = None


def normalize_labels(
    raw: Iterable[str], alias_map: Mapping[str, str] | None = None
) -> set[str]:
    """Lowercase, trim, alias-substitute and deduplicate detector labels.

    The alias map bridges detector class names and vocabulary keyword
    phrasing (e.g. "person" -> "human being"); lookups happen after
    lowercasing, and replacement values are normalized too.
    """
    aliases = alias_map or {}
    out: set[str] = set()
    for label in raw:
        norm = label.strip().lower()
        if not norm:
            continue
        norm = aliases.get(norm, norm).strip().lower()
        if norm:
            out.add(norm)
    return out


def map_keywords(
    labels: set[str], vocab: Vocabulary, run_singleton: bool = False
) -> MatchResult:
    """Map a label set to codes via the relaxing keyword search.

    Pass 1 finds codes whose keyword set equals ``labels`` exactly; only
    if that is empty, pass 2 accepts codes whose keywords are a superset.
    With ``run_singleton``, every label is additionally searched on its
    own regardless of the earlier passes, and those codes are unioned
    into the result (this is the deliberately loose, code-exploding
    step; it is off by default).
    """
    if not labels:
        raise EmptyLabelSet("cannot map an empty label set")
    codes = vocab.codes_with_keyword_set(labels)
    if codes:
        pass_used = PASS_EXACT
    else:
        codes = vocab.codes_with_keywords_superset(labels)
        pass_used = PASS_SUBSET if codes else PASS_NONE

    singleton_codes: dict[str, set[str]] | None = None
    if run_singleton:
        singleton_codes = {label: vocab.codes_with_keyword(label) for label in labels}
        for per_label in singleton_codes.values():
            codes |= per_label
    return MatchResult(codes=codes, pass_used=pass_used, singleton_codes=singleton_codes)


def map_descriptions(labels: set[str], vocab: Vocabulary) -> set[str]:
    """Map labels to codes through display texts instead of keywords:
    codes whose text contains every label as a whole word.  (With the
    containment requirement there is nothing left to relax, so the
    exact/subset distinction of the keyword route collapses.)"""
    if not labels:
        raise EmptyLabelSet("cannot map an empty label set")
    result: set[str] | None = None
    for label in labels:
        found = vocab.codes_with_text_containing(label)
        result = found if result is None else result & found
        if not result:
            return set()
    return result if result is not None else set()


def reduce_intersection(a: set[str], b: set[str]) -> set[str]:
    """Keep the codes both mapping routes agree on."""
    return a & b


def reduce_shortest_title(
    codes: set[str], labels: set[str], vocab: Vocabulary
) -> set[str]:
    """For each label, keep the candidate whose display text contains the
    label and is shortest (the most generic object code); ties break on
    the lexicographically smallest notation.  Codes whose text matches no
    label are dropped, as are codes absent from the vocabulary.
    """
    kept: set[str] = set()
    for label in labels:
        best: tuple[int, str] | None = None
        for code in codes:
            text = vocab.text_of(code)
            if text is None or not contains_word(text, label):
                continue
            candidate = (len(text), code)
            if best is None or candidate < best:
                best = candidate
        if best is not None:
            kept.add(best[1])
    return kept


def reduce_external(
    codes: set[str],
    cmd: CommandSpec,
    vocab: Vocabulary | None = None,
    timeout: float = 30.0,
) -> set[str]:
    """Let an external command select codes to keep.

    The child receives ``{"candidates": [{"code", "text"}, ...]}`` on
    stdin and must answer ``{"selected": [...]}`` on stdout.  Selected
    codes outside the candidate set are discarded (selectors must never
    introduce codes), so the result is always a subset of ``codes``.

    Raises :class:`ExternalCommandFailure` on a nonzero exit, timeout,
    or unparseable output.
    """
    argv = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
    payload = json.dumps(
        {
            "candidates": [
                {"code": c, "text": (vocab.text_of(c) if vocab else None) or ""}
                for c in sorted(codes)
            ]
        }
    )
    try:
        proc = subprocess.run(
            argv,
            input=payload,
            capture_output=True,
            text=True,
            timeout=timeout,
        )
    except subprocess.TimeoutExpired as exc:
        raise ExternalCommandFailure(f"selector timed out after {timeout}s") from exc
    except OSError as exc:
        raise ExternalCommandFailure(f"could not run selector: {exc}") from exc
    if proc.returncode != 0:
        raise ExternalCommandFailure(
            f"selector exited {proc.returncode}: {proc.stderr.strip()}"
        )
    try:
        reply = json.loads(proc.stdout)
    except json.JSONDecodeError as exc:
        raise ExternalCommandFailure(f"selector emitted invalid JSON: {exc}") from exc
    if not isinstance(reply, dict) or not isinstance(reply.get("selected"), list):
        raise ExternalCommandFailure("selector reply missing 'selected' list")
    selected = {s for s in reply["selected"] if isinstance(s, str)}
    dropped = selected - codes
    if dropped:
        log.warning(
            "selector returned %d code(s) outside the candidate set, ignored: %s",
            len(dropped),
            ", ".join(sorted(dropped)),
        )
    return selected & codes
