"""
Three recommenders over a code-annotated corpus
===============================================
"""

from pathlib import Path

from iconorec import build_index, ingest_corpus, recommend, recommend_all

DATA = Path(__file__).resolve().parent.parent / "data"

# The corpus is a plain image -> codes map (the annotation layout of the
# public Iconclass test set).  The index derives IDF weights plus exact
# and ancestor posting lists from it.
docs = ingest_corpus(DATA / "corpus.json")
index = build_index(docs)
print(f"{len(index)} documents, {len(index.postings)} distinct codes")

# The Hercules dye code 94L53 appears nowhere in the corpus, so the two
# set-overlap methods come back empty.  Only hierarchy proximity bridges
# the gap, crediting three nearby codes on the same image.
print("\nquery: 94L53 (not assigned to any image)")
for method, rec in recommend_all({"94L53"}, index).items():
    if rec is None:
        print(f"  {method}: no hit")
    else:
        print(f"  {method}: {rec.image_id} (score {rec.score})")
        for query_code, matched, share in rec.explanation:
            print(f"      {query_code} ~ {matched}: +{share}")

# A richer query shows the methods disagreeing productively: hierarchy
# and IDF favor the scene sharing the rare horse-and-man code, Jaccard
# prefers the tightest overlap.
query = {"34B11", "46C13141(+78)", "25F24"}
print("\nquery:", sorted(query))
for method, rec in recommend_all(query, index).items():
    print(f"  {method}: {rec.image_id} (score {round(rec.score, 4)})")

# Raising idf_impact exponentiates per-code weights so rare, diagnostic
# codes dominate common object codes.
for impact in (1.0, 2.0):
    hits = recommend(query, index, "idf", k=3, impact=impact)
    print(f"\nidf top-3 at impact {impact}:")
    for rec in hits:
        print(f"  {rec.image_id}: {round(rec.score, 4)}")
