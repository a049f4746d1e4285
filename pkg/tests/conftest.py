import sys
from pathlib import Path

import pytest

from iconorec.corpus import build_index, ingest_corpus
from iconorec.vocabulary import load_vocabulary

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"

sys.path.insert(0, str(Path(__file__).resolve().parent))

# The six codes whose only keyword is "dog" in the fixture vocabulary.
DOG_ONLY_CODES = frozenset(
    {
        "11H(CRISPIN & CRISPINIAN)69",
        "34B11",
        "43A3746",
        "43C2181",
        "46E31",
        "73F215321",
    }
)

HERCULES_DOC = "hercules_labours.jpg"
HERCULES_CODES = frozenset({"94L5", "94L8(CLUB)", "94L8(LION'S SKIN)"})


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def vocab():
    return load_vocabulary(DATA_DIR / "vocabulary.jsonl")


@pytest.fixture(scope="session")
def corpus_docs():
    return ingest_corpus(DATA_DIR / "corpus.json")


@pytest.fixture(scope="session")
def corpus_index(corpus_docs):
    return build_index(corpus_docs)


@pytest.fixture(scope="session")
def notation_fixture_lines() -> list[str]:
    return (DATA_DIR / "notations.txt").read_text().splitlines()


@pytest.fixture(scope="session")
def index_cache(tmp_path_factory, corpus_index):
    path = tmp_path_factory.mktemp("index") / "corpus.idx.json"
    corpus_index.save(path)
    return path
