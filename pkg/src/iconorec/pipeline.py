"""End-to-end orchestration: detector labels in, codes and per-method
recommendations out, as one auditable report.

The staged workflow is fixed: normalize labels, map them to codes, infer
abstract codes with the rule file, apply the configured reducer, then
query the three recommenders.  Defaults keep the loose singleton pass and
all reducers off.  The object detector is never embedded; images are
handled by spawning a configured external command that emits the
LabelDocument JSON contract.
"""

from __future__ import annotations

import json
import logging
import shlex
import subprocess
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .corpus import CorpusIndex, Recommendation, load_index, recommend_all
from .errors import (
    DetectorFailure,
    EmptyLabelSet,
    ExternalCommandFailure,
    FormatError,
    PipelineStageFailure,
)
from .matcher import (
    LabelDocument,
    map_descriptions,
    map_keywords,
    normalize_labels,
    reduce_external,
    reduce_intersection,
    reduce_shortest_title,
)
from .rules import RuleSet, infer, load_rules
from .vocabulary import Vocabulary, load_vocabulary

log = logging.getLogger(__name__)

REDUCER_NONE = "none"
REDUCER_INTERSECTION = "intersection"
REDUCER_SHORTEST_TITLE = "shortest_title"
REDUCER_EXTERNAL = "external"
REDUCERS = (REDUCER_NONE, REDUCER_INTERSECTION, REDUCER_SHORTEST_TITLE, REDUCER_EXTERNAL)

DETECTOR_TIMEOUT = 120.0

PipelineInput = Union[LabelDocument, str, Path]


@dataclass
class PipelineConfig:
    """Pipeline wiring.  Defaults deliberately keep the singleton pass
    and the reducers off; both over- or under-generate and are explicit
    opt-ins."""

    vocab_path: str | Path | None = None
    rules_path: str | Path | None = None
    alias_map_path: str | Path | None = None
    corpus_index_path: str | Path | None = None
    run_singleton: bool = False
    reducer: str = REDUCER_NONE
    external_cmd: str | None = None
    idf_impact: float = 1.0
    detector_cmd: str | None = None

    def __post_init__(self):
        if self.reducer not in REDUCERS:
            raise ValueError(f"unknown reducer {self.reducer!r}")
        if self.reducer == REDUCER_EXTERNAL and not self.external_cmd:
            raise ValueError("reducer 'external' requires external_cmd")


CONFIG_FIELDS = (
    "vocab_path",
    "rules_path",
    "alias_map_path",
    "corpus_index_path",
    "run_singleton",
    "reducer",
    "external_cmd",
    "idf_impact",
    "detector_cmd",
)


def load_config(path: str | Path) -> PipelineConfig:
    """Read a JSON config file whose keys mirror PipelineConfig fields."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid config JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError("config must be a JSON object")
    unknown = set(data) - set(CONFIG_FIELDS)
    if unknown:
        raise FormatError(f"unknown config field(s): {sorted(unknown)}")
    return PipelineConfig(**data)


@dataclass
class PipelineReport:
    """Per-stage outputs for one image, plus everything warned along the
    way.  ``codes_final`` is always a subset of detected plus inferred."""

    image_id: str
    labels: set[str]
    codes_detected: set[str]
    codes_inferred: set[str]
    codes_final: set[str]
    recommendations: dict[str, Recommendation | None] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "image_id": self.image_id,
            "labels": sorted(self.labels),
            "codes_detected": sorted(self.codes_detected),
            "codes_inferred": sorted(self.codes_inferred),
            "codes_final": sorted(self.codes_final),
            "recommendations": {
                method: (rec.to_json() if rec is not None else None)
                for method, rec in sorted(self.recommendations.items())
            },
            "warnings": list(self.warnings),
        }


class _WarningCollector(logging.Handler):
    def __init__(self):
        super().__init__(level=logging.WARNING)
        self.messages: list[str] = []

    def emit(self, record: logging.LogRecord) -> None:
        self.messages.append(record.getMessage())


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineStageFailure:
        raise
    except Exception as exc:
        raise PipelineStageFailure(name, exc) from exc


class Pipeline:
    """Loads the configured resources once and runs the staged workflow
    for any number of inputs.  All loaded state is immutable, so one
    Pipeline can serve concurrent callers."""

    def __init__(self, cfg: PipelineConfig):
        if cfg.vocab_path is None:
            raise ValueError("PipelineConfig.vocab_path is required")
        self.cfg = cfg
        collector = _WarningCollector()
        root = logging.getLogger(__package__)
        root.addHandler(collector)
        try:
            self.vocab: Vocabulary = load_vocabulary(cfg.vocab_path)
            self.rules: RuleSet = (
                load_rules(cfg.rules_path) if cfg.rules_path else RuleSet()
            )
            self.aliases: dict[str, str] = (
                _load_alias_map(cfg.alias_map_path) if cfg.alias_map_path else {}
            )
            self.index: CorpusIndex | None = (
                load_index(cfg.corpus_index_path) if cfg.corpus_index_path else None
            )
        finally:
            root.removeHandler(collector)
        # Data-quality warnings from loading surface in every report.
        self.load_warnings: list[str] = list(collector.messages)

    def classify(self, source: PipelineInput) -> PipelineReport:
        """Run normalize, map, infer and reduce; recommendations stay
        empty.  ``source`` is a LabelDocument or an image path handled
        by the configured detector command."""
        collector = _WarningCollector()
        root = logging.getLogger(__package__)
        root.addHandler(collector)
        try:
            return self._classify(source, collector)
        finally:
            root.removeHandler(collector)

    def classify_and_recommend(self, source: PipelineInput) -> PipelineReport:
        """The full workflow: classify, then ask all three recommenders
        for their top hit against the configured corpus index."""
        collector = _WarningCollector()
        root = logging.getLogger(__package__)
        root.addHandler(collector)
        try:
            report = self._classify(source, collector)
            with _stage("recommend"):
                report.recommendations = self._recommend(report.codes_final)
            report.warnings = self.load_warnings + collector.messages
            return report
        finally:
            root.removeHandler(collector)

    def _classify(
        self, source: PipelineInput, collector: _WarningCollector
    ) -> PipelineReport:
        if isinstance(source, (str, Path)):
            with _stage("detect"):
                doc = _run_detector(source, self.cfg.detector_cmd)
        else:
            doc = source

        with _stage("normalize"):
            labels = normalize_labels(doc.labels, self.aliases)
            if not labels:
                raise EmptyLabelSet(f"no labels for image {doc.image_id!r}")

        with _stage("map"):
            match = map_keywords(labels, self.vocab, self.cfg.run_singleton)
            codes_detected = set(match.codes)
            description_codes = (
                map_descriptions(labels, self.vocab)
                if self.cfg.reducer == REDUCER_INTERSECTION
                else None
            )

        with _stage("infer"):
            closed = infer(codes_detected, labels, self.rules)
            codes_inferred = closed - codes_detected

        with _stage("reduce"):
            codes_final = (
                self._reduce(codes_detected, labels, description_codes)
                | codes_inferred
            )

        return PipelineReport(
            image_id=doc.image_id,
            labels=labels,
            codes_detected=codes_detected,
            codes_inferred=codes_inferred,
            codes_final=codes_final,
            recommendations={},
            warnings=self.load_warnings + collector.messages,
        )

    def _reduce(
        self,
        codes: set[str],
        labels: set[str],
        description_codes: set[str] | None,
    ) -> set[str]:
        if self.cfg.reducer == REDUCER_NONE or not codes:
            return set(codes)
        if self.cfg.reducer == REDUCER_INTERSECTION:
            return reduce_intersection(codes, description_codes or set())
        if self.cfg.reducer == REDUCER_SHORTEST_TITLE:
            return reduce_shortest_title(codes, labels, self.vocab)
        try:
            return reduce_external(codes, self.cfg.external_cmd, self.vocab)
        except ExternalCommandFailure as exc:
            log.warning("external reducer failed (%s); keeping unreduced codes", exc)
            return set(codes)

    def _recommend(self, codes: set[str]) -> dict[str, Recommendation | None]:
        if self.index is None:
            log.warning("no corpus index configured; recommendations skipped")
            return {}
        if not codes:
            log.warning("no codes to recommend from; recommendations skipped")
            return {}
        return recommend_all(codes, self.index, impact=self.cfg.idf_impact)


def classify_and_recommend(source: PipelineInput, cfg: PipelineConfig) -> PipelineReport:
    """One-shot wrapper around :class:`Pipeline` for single images."""
    return Pipeline(cfg).classify_and_recommend(source)


def _load_alias_map(path: str | Path) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid alias map JSON: {exc}") from exc
    if not isinstance(data, dict) or any(
        not isinstance(k, str) or not isinstance(v, str) for k, v in data.items()
    ):
        raise FormatError("alias map must be a JSON object mapping label to label")
    return {k.strip().lower(): v.strip().lower() for k, v in data.items()}


def _run_detector(image_path: str | Path, detector_cmd: str | None) -> LabelDocument:
    """Spawn the configured detector and parse its LabelDocument output.

    ``{image}`` in the command is replaced with the image path; without a
    placeholder the path is appended as the final argument.
    """
    if not detector_cmd:
        raise DetectorFailure("an image path was given but no detector_cmd is configured")
    argv = shlex.split(detector_cmd)
    if any("{image}" in token for token in argv):
        argv = [token.replace("{image}", str(image_path)) for token in argv]
    else:
        argv.append(str(image_path))
    try:
        proc = subprocess.run(
            argv, capture_output=True, text=True, timeout=DETECTOR_TIMEOUT
        )
    except subprocess.TimeoutExpired as exc:
        raise DetectorFailure(f"detector timed out after {DETECTOR_TIMEOUT}s") from exc
    except OSError as exc:
        raise DetectorFailure(f"could not run detector: {exc}") from exc
    if proc.returncode != 0:
        raise DetectorFailure(
            f"detector exited {proc.returncode}: {proc.stderr.strip()}"
        )
    try:
        doc = LabelDocument.from_json(json.loads(proc.stdout))
    except (json.JSONDecodeError, FormatError) as exc:
        raise DetectorFailure(f"detector emitted invalid LabelDocument: {exc}") from exc
    return doc
