"""Iconclass-aware classification support and content-based artwork
recommendation.

The package maps detected object labels on digitized artworks to
Iconclass notation codes (keyword matching, description search, and
rule-based inference of abstract subjects) and recommends thematically
related artworks from a code-annotated corpus via three complementary
similarity measures: hierarchy proximity, IDF-weighted overlap, and
Jaccard overlap.
"""

from .corpus import (
    CorpusDoc,
    CorpusIndex,
    Recommendation,
    build_index,
    ingest_corpus,
    load_index,
    recommend,
    recommend_all,
)
from .errors import (
    DetectorFailure,
    DuplicateImageId,
    EmptyLabelSet,
    EmptyQuery,
    ExternalCommandFailure,
    FormatError,
    IconorecError,
    MalformedNotation,
    PipelineStageFailure,
    RuleFormatError,
    UnknownCode,
)
from .matcher import (
    Detection,
    LabelDocument,
    MatchResult,
    map_descriptions,
    map_keywords,
    normalize_labels,
    reduce_external,
    reduce_intersection,
    reduce_shortest_title,
)
from .notation import (
    Atom,
    Notation,
    ancestors,
    hierarchy_relation,
    parent,
    parse,
)
from .pipeline import (
    Pipeline,
    PipelineConfig,
    PipelineReport,
    classify_and_recommend,
    load_config,
)
from .rules import Rule, RuleSet, infer, load_rules
from .similarity import IdfTable, hierarchy_score, idf, idf_overlap, jaccard
from .vocabulary import VocabEntry, Vocabulary, load_vocabulary

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "CorpusDoc",
    "CorpusIndex",
    "Detection",
    "DetectorFailure",
    "DuplicateImageId",
    "EmptyLabelSet",
    "EmptyQuery",
    "ExternalCommandFailure",
    "FormatError",
    "IconorecError",
    "IdfTable",
    "LabelDocument",
    "MalformedNotation",
    "MatchResult",
    "Notation",
    "Pipeline",
    "PipelineConfig",
    "PipelineReport",
    "PipelineStageFailure",
    "Recommendation",
    "Rule",
    "RuleFormatError",
    "RuleSet",
    "UnknownCode",
    "VocabEntry",
    "Vocabulary",
    "ancestors",
    "build_index",
    "classify_and_recommend",
    "hierarchy_relation",
    "hierarchy_score",
    "idf",
    "idf_overlap",
    "infer",
    "ingest_corpus",
    "jaccard",
    "load_config",
    "load_index",
    "load_rules",
    "load_vocabulary",
    "map_descriptions",
    "map_keywords",
    "normalize_labels",
    "parent",
    "parse",
    "recommend",
    "recommend_all",
    "reduce_external",
    "reduce_intersection",
    "reduce_shortest_title",
]
