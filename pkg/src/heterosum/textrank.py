"""Per-document salience: similarity graph, score recurrence, selection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .providers import cosine


@dataclass
class SentenceGraph:
    n: int
    weights: dict = field(default_factory=dict)  # (i, j) with i < j -> similarity
    min_edge_sim: float = 0.0

    def neighbors_matrix(self) -> np.ndarray:
        w = np.zeros((self.n, self.n), dtype=np.float64)
        for (i, j), v in self.weights.items():
            w[i, j] = v
            w[j, i] = v
        return w


@dataclass
class RankResult:
    scores: dict
    iterations: int
    converged: bool

    def ranking(self) -> list[int]:
        # descending score, ties to the earlier document position
        return sorted(self.scores, key=lambda i: (-self.scores[i], i))


def build_sentence_graph(sentences, embedder, min_edge_sim: float = 0.05) -> SentenceGraph:
    """Edges carry embedding cosine similarity; weak or negative ones are cut."""
    sentences = list(sentences)
    if not sentences:
        raise ValueError("need at least one sentence")
    vectors = [embedder.embed(s) for s in sentences]
    weights = {}
    for i in range(len(sentences)):
        for j in range(i + 1, len(sentences)):
            sim = cosine(vectors[i], vectors[j])
            if sim > min_edge_sim and sim > 0.0:
                weights[(i, j)] = sim
    return SentenceGraph(len(sentences), weights, min_edge_sim)


def pagerank(graph: SentenceGraph, d: float = 0.85, tau: float = 1e-4, max_iters: int = 200) -> RankResult:
    """Iterate S(i) = (1-d) + d * sum_j (w_ji / sum_k w_jk) S(j) from all-ones.

    Isolated vertices settle at 1-d. Non-convergence within ``max_iters`` is
    reported through ``converged``, not raised.
    """
    if not 0.0 < d < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    w = graph.neighbors_matrix()
    rowsum = w.sum(axis=1)
    mt = np.zeros_like(w)
    nz = rowsum > 0.0
    # mt[i, j] = w[j, i] / rowsum[j]
    mt[:, nz] = (w[nz, :] / rowsum[nz, None]).T
    scores, iters, converged = _kernels.rank_iterate(mt, d, tau, max_iters)
    return RankResult({i: float(scores[i]) for i in range(graph.n)}, iters, converged)


def select_salient(result: RankResult, sentences, mode: str = "drop", r: float = 0.3):
    """Keep the top-ranked sentences, returned in document order.

    drop mode cuts at the widest gap between adjacent ranked scores, bounded
    to [1, ceil(0.3 n)]; top_percent keeps ceil(r * n).
    """
    sentences = list(sentences)
    n = len(sentences)
    if n == 0 or not result.scores:
        raise ValueError("empty ranking")
    order = result.ranking()
    if mode == "drop":
        if n == 1:
            keep = 1
        else:
            ranked = [result.scores[i] for i in order]
            gaps = [ranked[t] - ranked[t + 1] for t in range(n - 1)]
            keep = gaps.index(max(gaps)) + 1
        keep = max(1, min(keep, math.ceil(0.3 * n)))
    elif mode == "top_percent":
        keep = max(1, min(n, math.ceil(r * n)))
    else:
        raise ValueError(f"unknown selection mode {mode!r}")
    chosen = sorted(order[:keep])
    return [sentences[i] for i in chosen]
