import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heterosum.metrics import (
    dale_chall,
    default_easy_words,
    rouge_l,
    rouge_n,
    summary_fluency,
)
from heterosum.providers import train_ngram_lm


def is_subsequence(sub, seq):
    it = iter(seq)
    return all(tok in it for tok in sub)


def lcs_oracle(ref_tokens, cand_tokens):
    """Exhaustive: longest subsequence of ref that is also one of cand."""
    best = 0
    for r in range(len(ref_tokens), 0, -1):
        for combo in itertools.combinations(range(len(ref_tokens)), r):
            sub = [ref_tokens[i] for i in combo]
            if is_subsequence(sub, cand_tokens):
                return r
    return best


class TestRougeN:
    def test_identical(self):
        for n in (1, 2):
            score = rouge_n("The cat sat on the mat.", "The cat sat on the mat.", n)
            assert score.recall == score.precision == score.f1 == 1.0

    def test_unigram_hand_case(self):
        score = rouge_n("the cat sat", "the cat ate", 1)
        assert score.recall == pytest.approx(2 / 3)
        assert score.precision == pytest.approx(2 / 3)

    def test_clipping(self):
        score = rouge_n("a a a", "a b", 1)
        assert score.precision == pytest.approx(1 / 3)
        assert score.recall == pytest.approx(1 / 2)

    def test_case_and_punctuation_folds(self):
        score = rouge_n("The CAT!", "the cat", 1)
        assert score.f1 == 1.0

    def test_empty_sides(self):
        assert rouge_n("", "some words", 1).f1 == 0.0
        assert rouge_n("words", "", 1).f1 == 0.0
        assert rouge_n("a", "b c", 2).f1 == 0.0  # candidate too short for a bigram

    def test_bigram_hand_case(self):
        # cand bigrams: {the cat, cat sat}; ref bigrams: {the cat, cat ran}
        score = rouge_n("the cat sat", "the cat ran", 2)
        assert score.recall == pytest.approx(1 / 2)
        assert score.precision == pytest.approx(1 / 2)

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            rouge_n("a", "b", 0)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.sampled_from(["cat", "dog", "ran", "sat"]), min_size=1, max_size=8))
    def test_self_score_one_and_symmetry(self, words):
        text = " ".join(words)
        assert rouge_n(text, text, 1).f1 == pytest.approx(1.0)
        other = "dog ran fast today"
        assert rouge_n(text, other, 1).recall == pytest.approx(rouge_n(other, text, 1).precision)


class TestRougeL:
    def test_identical_single_sentence(self):
        score = rouge_l("The cat sat.", "The cat sat.")
        assert score.recall == score.precision == score.f1 == 1.0

    def test_hand_case(self):
        score = rouge_l("a b c d", "a c d")
        assert score.recall == pytest.approx(1.0)
        assert score.precision == pytest.approx(0.75)

    def test_disjoint(self):
        assert rouge_l("alpha beta", "gamma delta").f1 == 0.0

    def test_multisentence_union(self):
        # r1=[a b]: union-LCS 2; r2=[c d]: union-LCS 1 -> hits 3 of ref 4, cand 4
        score = rouge_l("A b c. X.", "A b. C d.")
        assert score.recall == pytest.approx(3 / 4)
        assert score.precision == pytest.approx(3 / 4)

    def test_matches_subsequence_oracle(self):
        rng = np.random.default_rng(29)
        vocab = ["the", "cat", "dog", "ran", "sat", "home"]
        for _ in range(25):
            ref_tokens = [vocab[i] for i in rng.integers(0, len(vocab), rng.integers(1, 9))]
            cand_tokens = [vocab[i] for i in rng.integers(0, len(vocab), rng.integers(1, 12))]
            ref = " ".join(ref_tokens) + "."
            cand = " ".join(cand_tokens) + "."
            expected = lcs_oracle(ref_tokens, cand_tokens)
            score = rouge_l(cand, ref)
            assert score.recall == pytest.approx(expected / len(ref_tokens))

    def test_scores_bounded(self):
        score = rouge_l("a b a b a", "b a")
        for v in (score.recall, score.precision, score.f1):
            assert 0.0 <= v <= 1.0


class TestDaleChall:
    def test_all_easy_two_sentences(self):
        easy = frozenset("one two three four five six seven eight nine ten".split())
        text = "One two three four five. Six seven eight nine ten."
        assert dale_chall(text, easy) == pytest.approx(0.0496 * 5, abs=1e-9)

    def test_all_difficult_one_sentence(self):
        text = "Qa qb qc qd qe qf qg qh qi qj."
        got = dale_chall(text, frozenset())
        assert got == pytest.approx(0.1579 * 100 + 0.0496 * 10 + 3.6365, abs=1e-9)

    def test_five_percent_boundary_no_bonus(self):
        easy = frozenset(["easy"])
        words = ["easy"] * 19 + ["hard"]
        text = "Easy " + " ".join(words[1:10]) + ". " + " ".join(words[10:]).capitalize() + "."
        got = dale_chall(text, easy)
        assert got == pytest.approx(0.1579 * 5 + 0.0496 * 10, abs=1e-9)

    def test_above_five_percent_bonus(self):
        easy = frozenset(["easy"])
        sent = "Easy easy easy easy hard."
        text = " ".join([sent] * 4)
        # 4 sentences, 20 words, 4 difficult -> 20%
        got = dale_chall(text, easy)
        assert got == pytest.approx(0.1579 * 20 + 0.0496 * 5 + 3.6365, abs=1e-9)

    def test_quarter_difficult_short(self):
        easy = frozenset(["the", "cat", "ran"])
        got = dale_chall("The cat ran zorbulently.", easy)
        assert got == pytest.approx(0.1579 * 25 + 0.0496 * 4 + 3.6365, abs=1e-9)

    def test_easy_word_changes_only_length_term(self):
        easy = frozenset(["a", "b", "c"])
        base = dale_chall("A b. C a.", easy)
        more = dale_chall("A b. C a b.", easy)
        assert more - base == pytest.approx(0.0496 * (5 / 2 - 4 / 2), abs=1e-9)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            dale_chall("...", frozenset())

    def test_default_list_loads(self):
        words = default_easy_words()
        assert "the" in words and len(words) > 500


class TestSummaryFluency:
    @pytest.fixture
    def lm(self):
        corpus = [["the", "cat", "ran", "."], ["the", "dog", "slept", "."]]
        return train_ngram_lm(corpus, order=2, smoothing_k=0.1)

    def test_single_sentence_equals_avg(self, lm):
        report = summary_fluency(["The cat ran ."], lm)
        expected = lm.sentence_logprob(["the", "cat", "ran", "."]).avg
        assert report.avg_sentence_logprob == pytest.approx(expected)
        assert report.sentence_count == 1

    def test_mean_bounds(self, lm):
        solo = summary_fluency(["Weird zq words here ."], lm)
        extended = summary_fluency(["Weird zq words here .", "The cat ran ."], lm)
        lo = min(
            solo.avg_sentence_logprob,
            lm.sentence_logprob(["the", "cat", "ran", "."]).avg,
        )
        assert extended.avg_sentence_logprob >= lo

    def test_deterministic(self, lm):
        r1 = summary_fluency(["The cat ran ."], lm)
        r2 = summary_fluency(["The cat ran ."], lm)
        assert r1 == r2

    def test_empty_rejected(self, lm):
        with pytest.raises(ValueError):
            summary_fluency([], lm)
