"""Document ingestion: JSONL reading, sentence segmentation, tokenization, POS tags.

Input text is assumed to be coreference-resolved upstream;
:func:`resolve_coreferences` is the no-op stand-in for that step.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

TAGSET = frozenset(
    ["NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "CONJ", "NUM", "PUNCT", "X"]
)

_LEXICON_PATH = Path(__file__).parent / "resources" / "lexicon.tsv"

# Words before a '.' that do not end a sentence. Single capital letters
# (initials) are guarded separately.
_ABBREVIATIONS = frozenset(
    """
    dr mr mrs ms prof st jr sr vs etc e.g i.e inc ltd co corp fig eq no dept
    univ est approx jan feb mar apr jun jul aug sep sept oct nov dec mt ft
    gen col lt sgt capt rev hon pres gov sen rep u.s u.k a.m p.m
    """.split()
)

_BOUNDARY = re.compile(r'([.!?]+)(\s+)(?=["\'“‘(]?[A-Z0-9])')
_NUMERIC = re.compile(r"^\d+([.,]\d+)*$")


@dataclass(frozen=True)
class Token:
    surface: str
    lower: str
    pos: str

    def __post_init__(self):
        if not self.surface:
            raise ValueError("empty token surface")
        if self.pos not in TAGSET:
            raise ValueError(f"unknown POS tag {self.pos!r}")


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    index: int
    tokens: tuple[Token, ...]
    text: str

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("sentence without tokens")

    def words(self) -> list[str]:
        return [t.lower for t in self.tokens]


@dataclass(frozen=True)
class Document:
    id: str
    raw_text: str
    sentences: tuple[Sentence, ...] = field(default=())
    gold_summary: str | None = None

    @classmethod
    def from_text(
        cls,
        doc_id: str,
        raw_text: str,
        gold_summary: str | None = None,
        tagger: "Tagger | None" = None,
    ) -> "Document":
        tagger = tagger or default_tagger()
        sentences = tuple(
            Sentence(doc_id, i, tuple(tagger.tag(s)), s)
            for i, s in enumerate(segment_sentences(raw_text))
        )
        return cls(doc_id, raw_text, sentences, gold_summary)


def resolve_coreferences(text: str) -> str:
    """Pass-through stub; plug a real resolver upstream of ingestion."""
    return text


def segment_sentences(raw_text: str) -> list[str]:
    """Split on sentence-final punctuation followed by a capitalized start.

    A '.' does not split after a guarded abbreviation or a single-letter
    initial. Output chunks are stripped slices of the input, so no
    non-whitespace character is ever dropped.
    """
    if not raw_text or not raw_text.strip():
        return []
    cuts = []
    for m in _BOUNDARY.finditer(raw_text):
        punct = m.group(1)
        if "." in punct and "!" not in punct and "?" not in punct:
            before = raw_text[: m.start()].split()
            last = before[-1].lstrip("\"'([{“‘") if before else ""
            if last.lower() in _ABBREVIATIONS or re.fullmatch(r"[A-Z]", last):
                continue
        cuts.append(m.end(1))
    out = []
    start = 0
    for cut in cuts:
        chunk = raw_text[start:cut].strip()
        if chunk:
            out.append(chunk)
        start = cut
    tail = raw_text[start:].strip()
    if tail:
        out.append(tail)
    return out


def tokenize(sentence_text: str) -> list[str]:
    """Whitespace split, then peel leading/trailing punctuation chars."""
    out = []
    for chunk in sentence_text.split():
        lead = []
        while chunk and _is_punct_char(chunk[0]):
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail = []
        while chunk and _is_punct_char(chunk[-1]):
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        out.extend(lead)
        if chunk:
            out.append(chunk)
        out.extend(reversed(trail))
    return out


def _is_punct_char(c: str) -> bool:
    return not (c.isalnum() or c == "'")


class Tagger:
    """Lexicon lookup with suffix-rule fallback; coarse tags only.

    Rules after the lexicon miss: all-punctuation -> PUNCT, numeric -> NUM,
    -ly -> ADV, -ing/-ed -> VERB, -s -> NOUN, else X.
    """

    def __init__(self, lexicon: dict[str, str]):
        for word, tag in lexicon.items():
            if tag not in TAGSET:
                raise ValueError(f"lexicon tag {tag!r} for {word!r} not in tagset")
        self.lexicon = lexicon

    @classmethod
    def from_file(cls, path: str | Path) -> "Tagger":
        lexicon = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                word, tag = line.split("\t")
                lexicon[word.lower()] = tag
        return cls(lexicon)

    def tag_word(self, word: str) -> str:
        lower = word.lower()
        if all(_is_punct_char(c) for c in word):
            return "PUNCT"
        hit = self.lexicon.get(lower)
        if hit is not None:
            return hit
        if _NUMERIC.match(word):
            return "NUM"
        if lower.endswith("ly"):
            return "ADV"
        if lower.endswith("ing") or lower.endswith("ed"):
            return "VERB"
        if lower.endswith("s"):
            return "NOUN"
        return "X"

    def tag(self, sentence_text: str) -> list[Token]:
        return [Token(w, w.lower(), self.tag_word(w)) for w in tokenize(sentence_text)]


_DEFAULT_TAGGER: Tagger | None = None


def default_tagger() -> Tagger:
    global _DEFAULT_TAGGER
    if _DEFAULT_TAGGER is None:
        _DEFAULT_TAGGER = Tagger.from_file(_LEXICON_PATH)
    return _DEFAULT_TAGGER


def tag_tokens(sentence_text: str) -> list[Token]:
    """Tokenize and tag one sentence with the shipped lexicon."""
    if not sentence_text.strip():
        raise ValueError("empty sentence")
    return default_tagger().tag(sentence_text)


def ingest_jsonl(path: str | Path, tagger: Tagger | None = None) -> list[Document]:
    """Read one document per JSONL line: {"id"?, "text", "summary"?}.

    Missing ids become "doc-<line number>" (1-based). A malformed line
    aborts with its line number; an empty "text" is skipped with a warning.
    """
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: malformed JSON line: {exc}") from exc
            if not isinstance(obj, dict) or "text" not in obj:
                raise ValueError(f"{path}:{lineno}: line lacks required 'text' field")
            text = obj["text"]
            if not text or not text.strip():
                logger.warning("%s:%d: empty 'text', document skipped", path, lineno)
                continue
            doc_id = str(obj.get("id") or f"doc-{lineno}")
            docs.append(Document.from_text(doc_id, text, obj.get("summary"), tagger))
    return docs


def write_jsonl(docs, path: str | Path) -> None:
    """Emit documents in the ingestion format (round-trips on "text")."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            obj = {"id": doc.id, "text": doc.raw_text}
            if doc.gold_summary is not None:
                obj["summary"] = doc.gold_summary
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
