"""
From detector labels to Iconclass codes
=======================================
"""

from pathlib import Path

from iconorec import (
    load_vocabulary,
    map_descriptions,
    map_keywords,
    normalize_labels,
    reduce_intersection,
    reduce_shortest_title,
)

DATA = Path(__file__).resolve().parent.parent / "data"

vocab = load_vocabulary(DATA / "vocabulary.jsonl")
print(f"{len(vocab)} vocabulary entries loaded")

# Detector class names rarely match vocabulary keywords verbatim; the
# alias map bridges the phrasing ("person" is not an Iconclass keyword).
labels = normalize_labels(["Dog", "dog"], alias_map={"person": "human being"})
print("normalized labels:", labels)

# Pass 1 looks for codes whose keyword set equals the labels exactly.
# A lone dog already matches six codes, from circus acts to Saint Peter.
result = map_keywords({"dog"}, vocab)
print(f"pass used: {result.pass_used}")
for code in sorted(result.codes):
    print("  ", code, "-", vocab.text_of(code))

# With two labels the exact pass usually fails and the subset pass takes
# over: the code only needs to carry both keywords, not exactly them.
result = map_keywords({"horse", "human being"}, vocab)
print("horse + human being ->", sorted(result.codes), f"({result.pass_used})")

# The optional singleton pass searches each label on its own.  It finds
# codes the stricter passes cannot, at the price of a code explosion.
loose = map_keywords({"horse", "human being"}, vocab, run_singleton=True)
print(f"with singleton pass: {len(loose.codes)} codes, e.g.", sorted(loose.codes)[:4])

# The description route matches labels against code texts instead.
by_text = map_descriptions({"dog"}, vocab)
print("texts wording 'dog':", sorted(by_text))

# Reducers shrink an over-generated set.  Intersecting both routes keeps
# the codes they agree on; the shortest-title heuristic keeps the most
# generic code per label.
dog_codes = map_keywords({"dog"}, vocab).codes
print("both routes agree on:", sorted(reduce_intersection(dog_codes, by_text)))
print("shortest title keeps:", reduce_shortest_title(dog_codes, {"dog"}, vocab))
