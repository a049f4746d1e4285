import io
import json
import random

import pytest

from iconorec.corpus import (
    CorpusDoc,
    METHODS,
    build_index,
    ingest_corpus,
    load_index,
    recommend,
    recommend_all,
    split_code_list,
)
from iconorec.errors import DuplicateImageId, EmptyQuery, FormatError

from conftest import HERCULES_CODES, HERCULES_DOC
from oracles import brute_force_recommend, random_corpus, synthetic_code_pool


class TestIngest:
    def test_json_map(self):
        docs = ingest_corpus(io.StringIO(json.dumps({"a.jpg": ["34B11"]})))
        assert docs == [CorpusDoc("a.jpg", frozenset({"34B11"}))]

    def test_hercules_doc(self, corpus_docs):
        by_id = {d.image_id: d for d in corpus_docs}
        assert by_id[HERCULES_DOC].codes == HERCULES_CODES

    def test_invalid_codes_dropped(self, caplog):
        docs = ingest_corpus(io.StringIO(json.dumps({"a.jpg": ["(((", "34B11"]})))
        assert docs == [CorpusDoc("a.jpg", frozenset({"34B11"}))]
        assert any("dropping invalid code" in m for m in caplog.messages)

    def test_doc_with_no_valid_codes_skipped(self, caplog):
        docs = ingest_corpus(io.StringIO(json.dumps({"bad.jpg": ["((("]})))
        assert docs == []
        assert any("skipped" in m for m in caplog.messages)

    def test_invalid_json_raises(self):
        with pytest.raises(FormatError):
            ingest_corpus(io.StringIO("nope"))

    def test_non_list_codes_raise(self):
        with pytest.raises(FormatError):
            ingest_corpus(io.StringIO(json.dumps({"a.jpg": "34B11"})))

    def test_tsv_with_bracket_spaces(self):
        line = "h.jpg\t94L5 94L8(CLUB) 94L8(LION'S SKIN)\n"
        docs = ingest_corpus(io.StringIO(line), format="tsv")
        assert docs[0].codes == HERCULES_CODES

    def test_tsv_wrong_arity(self):
        with pytest.raises(FormatError):
            ingest_corpus(io.StringIO("a.jpg 34B11\n"), format="tsv")


def test_split_code_list():
    assert split_code_list("34B11,46C13141(+78)", separators=",") == [
        "34B11",
        "46C13141(+78)",
    ]
    assert split_code_list("11H(CRISPIN & CRISPINIAN)69 34B11", separators=" ") == [
        "11H(CRISPIN & CRISPINIAN)69",
        "34B11",
    ]
    assert split_code_list("  34B11 ,, ", separators=", ") == ["34B11"]


class TestBuildIndex:
    def test_doc_freq_matches_postings(self, corpus_index):
        assert corpus_index.idf.n_docs == len(corpus_index)
        for code, ids in corpus_index.postings.items():
            assert corpus_index.idf.doc_freq[code] == len(ids)

    def test_idf_values(self):
        docs = [CorpusDoc(f"{i}.jpg", frozenset({"1A"} if i < 2 else {"2B"})) for i in range(4)]
        idx = build_index(docs)
        assert idx.idf.doc_freq["1A"] == 2
        from iconorec.similarity import idf

        assert idf(idx.idf, "1A") == pytest.approx(0.6931, abs=1e-4)

    def test_shared_by_all_gives_zero_idf(self):
        docs = [CorpusDoc("a", frozenset({"1A"})), CorpusDoc("b", frozenset({"1A"}))]
        idx = build_index(docs)
        from iconorec.similarity import idf

        assert idf(idx.idf, "1A") == 0.0

    def test_ancestor_postings_reach_grandparents(self, corpus_index):
        assert HERCULES_DOC in corpus_index.ancestor_postings["94L"]
        assert HERCULES_DOC in corpus_index.ancestor_postings["94L5"]
        assert HERCULES_DOC in corpus_index.ancestor_postings["94L8(CLUB)"]

    def test_postings_subset_of_ancestor_postings(self, corpus_index):
        from iconorec.notation import parent, parse

        for code, ids in corpus_index.postings.items():
            node = parse(code)
            keys = [node.raw]
            up = parent(node)
            if up:
                keys.append(up.raw)
                up2 = parent(up)
                if up2:
                    keys.append(up2.raw)
            for key in keys:
                assert ids <= corpus_index.ancestor_postings[key]

    def test_duplicate_image_id(self):
        docs = [CorpusDoc("a", frozenset({"1A"})), CorpusDoc("a", frozenset({"2B"}))]
        with pytest.raises(DuplicateImageId):
            build_index(docs)


class TestRecommend:
    def test_hercules_hierarchy_only(self, corpus_index):
        hits = recommend({"94L53"}, corpus_index, "hierarchy", k=3)
        assert [h.image_id for h in hits] == [HERCULES_DOC]
        assert hits[0].score == pytest.approx(1.0, abs=1e-9)
        assert recommend({"94L53"}, corpus_index, "idf") == []
        assert recommend({"94L53"}, corpus_index, "jaccard") == []

    def test_hercules_explanation(self, corpus_index):
        (hit,) = recommend({"94L53"}, corpus_index, "hierarchy")
        assert sorted(hit.explanation) == [
            ("94L53", "94L5", 0.5),
            ("94L53", "94L8(CLUB)", 0.25),
            ("94L53", "94L8(LION'S SKIN)", 0.25),
        ]

    def test_unique_exact_match_tops_all_methods(self, corpus_index):
        # dog_portrait_a is the only doc equal to the query set
        for method in METHODS:
            hits = recommend({"34B11"}, corpus_index, method, k=1)
            assert hits[0].image_id == "dog_portrait_a.jpg"

    def test_exclude_removes_query_image(self, corpus_index):
        full = recommend({"34B11"}, corpus_index, "jaccard", k=1)
        assert full[0].image_id == "dog_portrait_a.jpg"
        trimmed = recommend(
            {"34B11"}, corpus_index, "jaccard", k=1, exclude="dog_portrait_a.jpg"
        )
        assert trimmed[0].image_id != "dog_portrait_a.jpg"

    def test_ties_break_on_image_id(self):
        docs = [
            CorpusDoc("b.jpg", frozenset({"1A"})),
            CorpusDoc("a.jpg", frozenset({"1A"})),
            CorpusDoc("c.jpg", frozenset({"1A"})),
        ]
        idx = build_index(docs)
        hits = recommend({"1A"}, idx, "jaccard", k=3)
        assert [h.image_id for h in hits] == ["a.jpg", "b.jpg", "c.jpg"]

    def test_empty_query_rejected(self, corpus_index):
        with pytest.raises(EmptyQuery):
            recommend(set(), corpus_index, "jaccard")

    def test_unknown_method_rejected(self, corpus_index):
        with pytest.raises(ValueError):
            recommend({"34B11"}, corpus_index, "cosine")

    def test_explanations_sum_to_score(self, corpus_index):
        query = {"34B11", "46C13141(+78)", "25F24"}
        for method in ("hierarchy", "idf"):
            for hit in recommend(query, corpus_index, method, k=10, impact=2.0):
                total = sum(c for _, _, c in hit.explanation)
                assert total == pytest.approx(hit.score, abs=1e-12)

    def test_jaccard_explanation_lists_shared_codes(self, corpus_index):
        query = {"34B11", "25F24"}
        for hit in recommend(query, corpus_index, "jaccard", k=10):
            shared = sorted(query & set(corpus_index.docs[hit.image_id].codes))
            assert [q for q, _, _ in hit.explanation] == shared
            assert sum(c for _, _, c in hit.explanation) == pytest.approx(
                hit.score, abs=1e-9
            )


class TestRecommendAll:
    def test_hercules(self, corpus_index):
        recs = recommend_all({"94L53"}, corpus_index)
        assert recs["hierarchy"].image_id == HERCULES_DOC
        assert recs["idf"] is None
        assert recs["jaccard"] is None

    def test_self_match_without_exclude(self, corpus_index):
        recs = recommend_all(set(HERCULES_CODES), corpus_index)
        assert recs["hierarchy"].image_id == HERCULES_DOC
        # 3 identical pairs plus the codes' own kinship, counted both ways:
        # 94L5~94L8(...) twice 0.25 each and the two attributes 0.5 each.
        assert recs["hierarchy"].score == pytest.approx(5.0, abs=1e-12)
        assert recs["jaccard"].image_id == HERCULES_DOC
        assert recs["jaccard"].score == 1.0
        assert recs["idf"].image_id == HERCULES_DOC

    def test_manual_hunt_codes_agreement_pattern(self, corpus_index):
        # Hierarchy and IDF converge on the same scene; Jaccard prefers a
        # tighter overlap elsewhere.
        recs = recommend_all({"34B11", "46C13141(+78)", "25F24"}, corpus_index)
        assert recs["hierarchy"].image_id == recs["idf"].image_id
        assert recs["jaccard"].image_id != recs["hierarchy"].image_id

    def test_empty_query_rejected(self, corpus_index):
        with pytest.raises(EmptyQuery):
            recommend_all(set(), corpus_index)


class TestIndexCache:
    def test_save_load_equals_rebuild(self, corpus_index, corpus_docs, tmp_path):
        path = tmp_path / "corpus.idx.json"
        corpus_index.save(path)
        loaded = load_index(path)
        assert loaded.docs == corpus_index.docs
        assert loaded.postings == corpus_index.postings
        assert loaded.ancestor_postings == corpus_index.ancestor_postings
        assert loaded.idf == corpus_index.idf

    def test_rebuild_is_deterministic(self, corpus_docs):
        a = build_index(corpus_docs)
        b = build_index(corpus_docs)
        assert a.docs == b.docs and a.idf == b.idf

    def test_version_mismatch_rejected(self, tmp_path):
        path = tmp_path / "bad.idx.json"
        path.write_text(json.dumps({"format_version": 99, "docs": {}}))
        with pytest.raises(FormatError):
            load_index(path)

    def test_garbage_rejected(self, tmp_path):
        path = tmp_path / "bad.idx.json"
        path.write_text("not json")
        with pytest.raises(FormatError):
            load_index(path)


class TestOracleEquivalence:
    """The indexed path must reproduce a naive all-pairs scan exactly.

    A slice of the acceptance criterion runs here for fast feedback; the
    full 100-corpora sweep lives in test_acceptance.py.
    """

    def test_indexed_matches_brute_force(self):
        rng = random.Random(4242)
        pool = synthetic_code_pool(rng, size=500)
        for trial in range(10):
            docs = random_corpus(rng, pool, max_docs=120, max_codes=10)
            idx = build_index(
                CorpusDoc(image_id, frozenset(codes)) for image_id, codes in docs.items()
            )
            query = set(rng.sample(pool, rng.randint(1, 8)))
            impact = rng.choice([0.0, 1.0, 2.0, 2.5])
            for method in METHODS:
                expected = brute_force_recommend(
                    query, docs, method, k=len(docs), impact=impact
                )
                actual = recommend(query, idx, method, k=len(docs), impact=impact)
                assert [h.image_id for h in actual] == [i for i, _ in expected], (
                    trial,
                    method,
                )
                for hit, (_, score) in zip(actual, expected):
                    assert hit.score == pytest.approx(score, abs=1e-12)

    def test_grandparent_only_counterpart_is_found(self):
        # The query code shares only a grandparent with the document code;
        # candidate generation must still surface the document.
        idx = build_index([CorpusDoc("far.jpg", frozenset({"34B12"}))])
        hits = recommend({"34B11"}, idx, "hierarchy")
        assert [h.image_id for h in hits] == ["far.jpg"]
        assert hits[0].score == 0.5  # siblings share the immediate parent
        idx2 = build_index([CorpusDoc("far.jpg", frozenset({"34B21"}))])
        hits2 = recommend({"34B11"}, idx2, "hierarchy")
        assert hits2[0].score == 0.25  # cousins: two steps both sides
