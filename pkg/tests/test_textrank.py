import math
from collections import defaultdict

import numpy as np
import pytest

from heterosum.providers import build_tfidf_embedder, cosine
from heterosum.textrank import RankResult, SentenceGraph, build_sentence_graph, pagerank, select_salient


def power_iteration_oracle(n, weights, d, iters):
    """Textbook reference: fixed iteration count, dict-based, no kernels."""
    nbrs = defaultdict(dict)
    for (i, j), w in weights.items():
        nbrs[i][j] = w
        nbrs[j][i] = w
    scores = {i: 1.0 for i in range(n)}
    for _ in range(iters):
        new = {}
        for i in range(n):
            acc = 0.0
            for j, wji in nbrs[i].items():
                acc += wji / sum(nbrs[j].values()) * scores[j]
            new[i] = (1 - d) + d * acc
        scores = new
    return scores


class TestPagerank:
    def test_isolated_vertex_score(self):
        g = SentenceGraph(1, {})
        res = pagerank(g, d=0.85)
        assert res.scores[0] == 1.0 - 0.85
        assert res.scores[0] == pytest.approx(0.15)
        assert res.converged

    def test_two_vertices_symmetric(self):
        g = SentenceGraph(2, {(0, 1): 0.7})
        res = pagerank(g)
        assert res.scores[0] == pytest.approx(res.scores[1])

    def test_four_vertex_graph_matches_oracle(self):
        weights = {(0, 1): 0.9, (0, 2): 0.2, (1, 2): 0.5, (2, 3): 0.8}
        g = SentenceGraph(4, weights)
        res = pagerank(g, d=0.85, tau=1e-10, max_iters=400)
        oracle = power_iteration_oracle(4, weights, 0.85, 200)
        for i in range(4):
            assert res.scores[i] == pytest.approx(oracle[i], abs=1e-6)

    def test_mixed_isolated_and_connected(self):
        weights = {(0, 1): 1.0}
        g = SentenceGraph(3, weights)
        res = pagerank(g)
        assert res.scores[2] == pytest.approx(0.15)
        oracle = power_iteration_oracle(3, weights, 0.85, 200)
        for i in range(3):
            assert res.scores[i] == pytest.approx(oracle[i], abs=1e-6)

    def test_non_convergence_reported(self):
        g = SentenceGraph(3, {(0, 1): 1.0, (1, 2): 0.2})
        res = pagerank(g, tau=1e-15, max_iters=3)
        assert not res.converged
        assert res.iterations == 3

    def test_label_invariance(self):
        weights = {(0, 1): 0.9, (0, 2): 0.2, (1, 3): 0.4, (2, 3): 0.6}
        res = pagerank(SentenceGraph(4, weights), tau=1e-12, max_iters=500)
        perm = [2, 0, 3, 1]  # old label -> new label
        permuted = {}
        for (i, j), w in weights.items():
            a, b = sorted((perm[i], perm[j]))
            permuted[(a, b)] = w
        res_p = pagerank(SentenceGraph(4, permuted), tau=1e-12, max_iters=500)
        for i in range(4):
            assert res_p.scores[perm[i]] == pytest.approx(res.scores[i], abs=1e-9)

    def test_edge_scale_invariance(self):
        weights = {(0, 1): 0.9, (1, 2): 0.1, (0, 3): 0.3}
        r1 = pagerank(SentenceGraph(4, weights), tau=1e-12, max_iters=500)
        scaled = {k: 37.5 * v for k, v in weights.items()}
        r2 = pagerank(SentenceGraph(4, scaled), tau=1e-12, max_iters=500)
        for i in range(4):
            assert r2.scores[i] == pytest.approx(r1.scores[i], abs=1e-9)

    def test_parameter_validation(self):
        g = SentenceGraph(1, {})
        with pytest.raises(ValueError):
            pagerank(g, d=1.0)
        with pytest.raises(ValueError):
            pagerank(g, tau=0.0)


class TestBuildSentenceGraph:
    def test_identical_sentences_weight_one(self, sentences_of):
        sents = sentences_of("the cat ran.", "the cat ran.")
        emb = build_tfidf_embedder(sents)
        g = build_sentence_graph(sents, emb, min_edge_sim=0.05)
        assert set(g.weights) == {(0, 1)}
        assert g.weights[(0, 1)] == pytest.approx(1.0)

    def test_disjoint_vocabulary_no_edge(self, sentences_of):
        sents = sentences_of("alpha beta gamma.", "delta epsilon zeta.")
        emb = build_tfidf_embedder(sents)
        g = build_sentence_graph(sents, emb, min_edge_sim=0.0)
        assert g.weights == {}

    def test_three_sentence_weights_match_cosines(self, sentences_of):
        sents = sentences_of("the cat ran home.", "the cat slept here.", "dogs bark loudly there.")
        emb = build_tfidf_embedder(sents)
        g = build_sentence_graph(sents, emb, min_edge_sim=0.0)
        for (i, j), w in g.weights.items():
            assert w == pytest.approx(cosine(emb.embed(sents[i]), emb.embed(sents[j])))
        assert (0, 1) in g.weights  # shared "the cat"


class TestSelectSalient:
    def _sents(self, sentences_of, n):
        return sentences_of(*[f"sentence number {i} stands alone." for i in range(n)])

    def test_drop_mode_cuts_at_largest_gap(self, sentences_of):
        sents = self._sents(sentences_of, 4)
        res = RankResult({0: 0.9, 1: 0.88, 2: 0.3, 3: 0.2}, 1, True)
        kept = select_salient(res, sents, mode="drop")
        assert [s.index for s in kept] == [0, 1]

    def test_single_sentence_any_mode(self, sentences_of):
        sents = self._sents(sentences_of, 1)
        res = RankResult({0: 0.4}, 1, True)
        assert len(select_salient(res, sents, mode="drop")) == 1
        assert len(select_salient(res, sents, mode="top_percent", r=0.01)) == 1

    def test_uniform_scores_top_percent_ties(self, sentences_of):
        sents = self._sents(sentences_of, 4)
        res = RankResult({i: 0.5 for i in range(4)}, 1, True)
        kept = select_salient(res, sents, mode="top_percent", r=0.5)
        assert [s.index for s in kept] == [0, 1]

    def test_drop_mode_bounds(self, sentences_of):
        # gap argmax sits deep, but the 30% cap applies: ceil(0.3 * 10) = 3
        sents = self._sents(sentences_of, 10)
        scores = {i: 1.0 - 0.001 * i for i in range(9)}
        scores[9] = 0.1
        res = RankResult(scores, 1, True)
        kept = select_salient(res, sents, mode="drop")
        assert len(kept) == 3

    def test_drop_mode_output_is_ranking_prefix(self, sentences_of):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(1, 9))
            sents = self._sents(sentences_of, n)
            res = RankResult({i: float(rng.random()) for i in range(n)}, 1, True)
            kept = select_salient(res, sents, mode="drop")
            prefix = res.ranking()[: len(kept)]
            assert {s.index for s in kept} == set(prefix)

    def test_document_order_preserved(self, sentences_of):
        sents = self._sents(sentences_of, 4)
        res = RankResult({0: 0.1, 1: 0.9, 2: 0.88, 3: 0.05}, 1, True)
        kept = select_salient(res, sents, mode="top_percent", r=0.5)
        assert [s.index for s in kept] == [1, 2]

    def test_unknown_mode(self, sentences_of):
        sents = self._sents(sentences_of, 2)
        res = RankResult({0: 0.5, 1: 0.4}, 1, True)
        with pytest.raises(ValueError):
            select_salient(res, sents, mode="weird")
