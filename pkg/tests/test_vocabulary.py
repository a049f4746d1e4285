import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iconorec.errors import FormatError
from iconorec.vocabulary import Vocabulary, load_vocabulary, normalize_keywords

from conftest import DATA_DIR, DOG_ONLY_CODES

DOG_FIXTURE_PATH = DATA_DIR / "vocabulary.jsonl"


def _jsonl(records) -> io.StringIO:
    return io.StringIO("\n".join(json.dumps(r) for r in records))


class TestLoad:
    def test_entry_retrievable(self):
        vocab = load_vocabulary(
            _jsonl([{"notation": "34B11", "text": "dog", "keywords": ["dog"]}])
        )
        assert "34B11" in vocab
        assert vocab.entries["34B11"].text == "dog"
        assert vocab.entries["34B11"].keywords == frozenset({"dog"})

    def test_empty_stream(self):
        vocab = load_vocabulary(io.StringIO(""))
        assert len(vocab) == 0

    def test_keywords_lowercased_and_trimmed(self):
        vocab = load_vocabulary(
            _jsonl([{"notation": "34B11", "text": "dog", "keywords": [" Dog ", ""]}])
        )
        assert vocab.entries["34B11"].keywords == frozenset({"dog"})

    def test_multi_keyword_entry_indexed_under_each(self):
        vocab = load_vocabulary(
            _jsonl(
                [{"notation": "94L53", "text": "Hercules discovers Tiryns' famous dye",
                  "keywords": ["dog", "dye"]}]
            )
        )
        assert vocab.codes_with_keyword("dog") == {"94L53"}
        assert vocab.codes_with_keyword("dye") == {"94L53"}

    def test_invalid_notation_skipped_with_warning(self, caplog):
        vocab = load_vocabulary(
            _jsonl(
                [
                    {"notation": "(((", "text": "broken", "keywords": ["x"]},
                    {"notation": "34B11", "text": "dog", "keywords": ["dog"]},
                ]
            )
        )
        assert len(vocab) == 1
        assert vocab.skipped == 1
        assert any("skipping record" in m for m in caplog.messages)

    def test_duplicate_keeps_last_and_warns(self, caplog):
        vocab = load_vocabulary(
            _jsonl(
                [
                    {"notation": "34B11", "text": "old", "keywords": ["old"]},
                    {"notation": "34B11", "text": "dog", "keywords": ["dog"]},
                ]
            )
        )
        assert vocab.entries["34B11"].text == "dog"
        assert vocab.skipped == 1
        assert any("duplicate notation" in m for m in caplog.messages)

    def test_invalid_json_raises(self):
        with pytest.raises(FormatError):
            load_vocabulary(io.StringIO("{not json\n"))

    def test_missing_field_raises(self):
        with pytest.raises(FormatError):
            load_vocabulary(_jsonl([{"notation": "34B11", "text": "dog"}]))

    def test_tsv(self):
        vocab = load_vocabulary(
            io.StringIO("34B11\tdog\tdog\n94L53\tHercules' dye\tdog, dye\n"),
            format="tsv",
        )
        assert vocab.entries["94L53"].keywords == frozenset({"dog", "dye"})

    def test_tsv_wrong_arity_raises(self):
        with pytest.raises(FormatError):
            load_vocabulary(io.StringIO("34B11\tdog\n"), format="tsv")

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            load_vocabulary(io.StringIO(""), format="csv")


class TestQueries:
    def test_exact_set_dog_returns_the_six(self, vocab):
        assert vocab.codes_with_keyword_set({"dog"}) == set(DOG_ONLY_CODES)

    def test_exact_set_dog_dye(self, vocab):
        assert vocab.codes_with_keyword_set({"dog", "dye"}) == {"94L53"}

    def test_exact_set_unknown_keyword(self, vocab):
        assert vocab.codes_with_keyword_set({"unicorn-xyz"}) == set()

    def test_superset_contains_exact(self, vocab):
        exact = vocab.codes_with_keyword_set({"dog"})
        assert exact <= vocab.codes_with_keywords_superset({"dog"})

    def test_superset_horse_human(self, vocab):
        found = vocab.codes_with_keywords_superset({"horse", "human being"})
        assert "46C13141(+78)" in found

    def test_single_keyword_counts(self, vocab):
        dog_codes = vocab.codes_with_keyword("dog")
        assert len(dog_codes) >= 7
        assert dog_codes == DOG_ONLY_CODES | {"94L53"}

    def test_unknown_keyword_empty(self, vocab):
        assert vocab.codes_with_keyword("zzz-absent") == set()

    def test_text_search_whole_word(self, vocab):
        found = vocab.codes_with_text_containing("dog")
        assert {"34B11", "46E31"} <= found
        # "dogs" is a different word; the plural-only texts stay out
        assert "43A3746" not in found
        assert "43C2181" not in found

    def test_text_search_dye(self, vocab):
        assert "94L53" in vocab.codes_with_text_containing("dye")

    def test_text_search_no_hit(self, vocab):
        assert vocab.codes_with_text_containing("qqq") == set()

    def test_empty_queries_rejected(self, vocab):
        with pytest.raises(ValueError):
            vocab.codes_with_keyword_set(set())
        with pytest.raises(ValueError):
            vocab.codes_with_keywords_superset(set())


class TestInvariants:
    def test_rebuild_equality(self, vocab):
        rebuilt = Vocabulary(vocab.entries.values())
        assert rebuilt.keyword_index == vocab.keyword_index
        assert rebuilt.keyword_set_index == vocab.keyword_set_index

    def test_duplicate_entries_rejected_by_constructor(self, vocab):
        entry = next(iter(vocab.entries.values()))
        with pytest.raises(FormatError):
            Vocabulary([entry, entry])

    def test_every_indexed_notation_parses(self, vocab):
        from iconorec.notation import parse

        for code in vocab.entries:
            parse(code)
        for codes in vocab.keyword_index.values():
            for code in codes:
                assert code in vocab.entries

    @given(
        st.sets(
            st.sampled_from(
                ["dog", "dye", "horse", "human being", "cat", "hunting", "lion"]
            ),
            min_size=1,
            max_size=3,
        )
    )
    def test_exact_subset_of_superset(self, keywords):
        vocab = load_vocabulary(DOG_FIXTURE_PATH)
        assert vocab.codes_with_keyword_set(keywords) <= (
            vocab.codes_with_keywords_superset(keywords)
        )

    @given(st.sampled_from(["dog", "dye", "horse", "human being", "absent"]))
    def test_superset_of_singleton_equals_keyword_query(self, keyword):
        vocab = load_vocabulary(DOG_FIXTURE_PATH)
        assert vocab.codes_with_keywords_superset({keyword}) == (
            vocab.codes_with_keyword(keyword)
        )


def test_normalize_keywords():
    assert normalize_keywords([" Dog", "dog ", "", "  "]) == frozenset({"dog"})
