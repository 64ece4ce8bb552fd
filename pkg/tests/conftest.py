import pytest

from heterosum import _kernels
from heterosum.corpus import Document, Sentence, tag_tokens


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # JIT compilation happens here so timed assertions stay honest.
    _kernels.warmup()


@pytest.fixture
def make_doc():
    def _make(doc_id, text, summary=None):
        return Document.from_text(doc_id, text, summary)

    return _make


@pytest.fixture
def sentences_of():
    def _make(*texts, doc_id="d"):
        return [Sentence(doc_id, i, tuple(tag_tokens(t)), t) for i, t in enumerate(texts)]

    return _make


@pytest.fixture
def small_group(make_doc):
    return [
        make_doc("a", "The black cat ran through the old garden. The dog slept near the door."),
        make_doc("b", "The black cat ran through the old garden. A bird sat on the roof."),
        make_doc("c", "Markets rose early today. The team won the game at home."),
    ]
