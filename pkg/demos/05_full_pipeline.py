"""
The whole workflow: labels in, codes and recommendations out
============================================================
"""

import json
import tempfile
from pathlib import Path

from iconorec import (
    LabelDocument,
    Pipeline,
    PipelineConfig,
    build_index,
    ingest_corpus,
)

DATA = Path(__file__).resolve().parent.parent / "data"

# The pipeline consumes an index cache from disk; build one first.
index_path = Path(tempfile.mkdtemp()) / "corpus.idx.json"
build_index(ingest_corpus(DATA / "corpus.json")).save(index_path)

config = PipelineConfig(
    vocab_path=DATA / "vocabulary.jsonl",
    rules_path=DATA / "rules.json",
    alias_map_path=DATA / "aliases.json",
    corpus_index_path=index_path,
    reducer="shortest_title",
)
pipeline = Pipeline(config)

# Stage order is fixed: normalize -> map -> infer -> reduce -> recommend.
# A dog portrait maps to six codes, the reducer keeps the generic one,
# and every recommender converges on canine imagery.
portrait = LabelDocument(image_id="aldrovandi_dog.jpg", labels=frozenset({"dog"}))
report = pipeline.classify_and_recommend(portrait)
print(json.dumps(report.to_json(), indent=2))

# Detector class names pass through the alias map ("person" becomes
# "human being"), and rule inference can add codes no object implies on
# its own.
hunt = LabelDocument(
    image_id="falcon_hunt.jpg",
    labels=frozenset({"horse", "person", "dog", "deer"}),
)
report = pipeline.classify_and_recommend(hunt)
print("labels:", sorted(report.labels))
print("detected:", sorted(report.codes_detected))
print("inferred by rules:", sorted(report.codes_inferred))
print("final:", sorted(report.codes_final))

# The same run, via the command line:
#   iconorec index build --corpus data/corpus.json --out corpus.idx.json
#   iconorec pipeline --labels data/labels_dog.json \
#       --vocab data/vocabulary.jsonl --alias-map data/aliases.json \
#       --rules data/rules.json --reducer shortest_title \
#       --index corpus.idx.json
