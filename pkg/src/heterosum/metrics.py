"""Summary scoring: n-gram and LCS overlap, readability, LM fluency."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .corpus import _is_punct_char, segment_sentences, tokenize

_EASY_WORDS_PATH = Path(__file__).parent / "resources" / "easy_words.txt"
_EASY_WORDS: frozenset | None = None


@dataclass
class RougeScore:
    recall: float
    precision: float
    f1: float

    @classmethod
    def from_counts(cls, overlap: float, ref_total: float, cand_total: float) -> "RougeScore":
        recall = overlap / ref_total if ref_total else 0.0
        precision = overlap / cand_total if cand_total else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(recall, precision, f1)


@dataclass
class ReadabilityReport:
    dale_chall: float
    avg_sentence_logprob: float
    sentence_count: int


def _words(text: str) -> list[str]:
    return [t.lower() for t in tokenize(text) if not all(_is_punct_char(c) for c in t)]


def rouge_n(candidate: str, reference: str, n: int) -> RougeScore:
    """Clipped n-gram overlap on lowercased, punctuation-stripped tokens."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cand = _words(candidate)
    ref = _words(reference)
    cand_grams = Counter(tuple(cand[i : i + n]) for i in range(len(cand) - n + 1))
    ref_grams = Counter(tuple(ref[i : i + n]) for i in range(len(ref) - n + 1))
    if not cand_grams or not ref_grams:
        return RougeScore(0.0, 0.0, 0.0)
    overlap = sum(min(c, ref_grams[g]) for g, c in cand_grams.items())
    return RougeScore.from_counts(overlap, sum(ref_grams.values()), sum(cand_grams.values()))


def _to_ids(tokens, ids: dict) -> np.ndarray:
    return np.fromiter(
        (ids.setdefault(t, len(ids)) for t in tokens), dtype=np.int32, count=len(tokens)
    )


def rouge_l(candidate: str, reference: str) -> RougeScore:
    """Summary-level LCS overlap.

    Each reference sentence collects the union of its LCS matches against
    the candidate sentences (one canonical alignment per pair); matched
    position counts aggregate into recall over reference tokens and
    precision over candidate tokens.
    """
    ref_sents = [_words(s) for s in segment_sentences(reference)]
    cand_sents = [_words(s) for s in segment_sentences(candidate)]
    ref_sents = [s for s in ref_sents if s]
    cand_sents = [s for s in cand_sents if s]
    ref_total = sum(len(s) for s in ref_sents)
    cand_total = sum(len(s) for s in cand_sents)
    if not ref_total or not cand_total:
        return RougeScore(0.0, 0.0, 0.0)
    ids: dict = {}
    cand_ids = [_to_ids(s, ids) for s in cand_sents]
    hits = 0
    for ref_sent in ref_sents:
        r = _to_ids(ref_sent, ids)
        mask = np.zeros(len(ref_sent), dtype=np.uint8)
        for c in cand_ids:
            table = _kernels.lcs_table(r, c)
            mask |= _kernels.lcs_backtrace(table, r, c)
        hits += int(mask.sum())
    return RougeScore.from_counts(hits, ref_total, cand_total)


def default_easy_words() -> frozenset:
    global _EASY_WORDS
    if _EASY_WORDS is None:
        text = _EASY_WORDS_PATH.read_text(encoding="utf-8")
        _EASY_WORDS = frozenset(w.strip().lower() for w in text.split() if w.strip())
    return _EASY_WORDS


def dale_chall(text: str, easy_words=None) -> float:
    """0.1579 * pct difficult + 0.0496 * words per sentence (+3.6365 over 5%)."""
    if easy_words is None:
        easy_words = default_easy_words()
    words = _words(text)
    sentences = segment_sentences(text)
    if not words or not sentences:
        raise ValueError("dale_chall needs at least one word and one sentence")
    difficult = sum(1 for w in words if w not in easy_words)
    frac = difficult / len(words)
    score = 0.1579 * (100.0 * frac) + 0.0496 * (len(words) / len(sentences))
    if frac > 0.05:
        score += 3.6365
    return score


def summary_fluency(summary_sentences, lm, easy_words=None) -> ReadabilityReport:
    """Mean per-token average log probability across summary sentences."""
    texts = [s for s in summary_sentences if s.strip()]
    if not texts:
        raise ValueError("empty summary")
    avgs = []
    for text in texts:
        tokens = [t.lower() for t in tokenize(text)]
        avgs.append(lm.sentence_logprob(tokens).avg)
    joined = " ".join(texts)
    return ReadabilityReport(
        dale_chall=dale_chall(joined, easy_words),
        avg_sentence_logprob=float(np.mean(avgs)),
        sentence_count=len(texts),
    )
