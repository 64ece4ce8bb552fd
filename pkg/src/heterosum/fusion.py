"""Sentence fusion: word graph construction and k-cheapest path search.

A cluster of similar sentences becomes one directed graph over
(lowered word, POS) vertices with dummy start/end anchors; every input
sentence is a start-to-end walk. Candidate fusions are the k cheapest walks
under a blended cost: the summed edge weights, plus the inverted average
log probability of the walk's token sequence,

    cost(walk) = a * sum(edge weights) + (1 - a) * (T + 1) / log P(walk)

where log P(walk) chains the T token conditionals and the end-of-sentence
term, all clamped so the division stays bounded. Higher-probability walks
cost less; because the probability term is an average, padding a walk with
extra tokens cannot buy unbounded negative cost, while the edge-weight sum
keeps growing. The search runs layer by layer over the depth-unrolled
graph (acyclic, so negative contributions are safe) and keeps, per
(context, verb) state, every partial walk not Pareto-dominated k times in
(edge sum, log probability); that retention is exact because two walks in
the same state share all feasible completions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels

START = 0
END = 1

_START_WORD = "<start>"
_END_WORD = "<end>"


@dataclass
class WordGraph:
    sentences: list
    words: list = field(default_factory=lambda: [_START_WORD, _END_WORD])
    poss: list = field(default_factory=lambda: [_START_WORD, _END_WORD])
    occ: list = field(default_factory=lambda: [{}, {}])  # vertex -> {sentence: graph position}
    adjacency: dict = field(default_factory=dict)  # u -> {v: [traversing sentences]}

    def freq(self, v: int) -> int:
        return len(self.occ[v])

    @property
    def n_vertices(self) -> int:
        return len(self.words)

    def out_edges(self, u: int) -> dict:
        return self.adjacency.get(u, {})

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency.get(u, {})


@dataclass
class FusionCandidate:
    tokens: tuple
    path: tuple  # vertex ids including the start/end anchors
    path_cost: float
    sent_logprob: float
    avg_logprob: float
    source_sentences: tuple  # (doc_id, sentence index) pairs

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def build_word_graph(cluster) -> WordGraph:
    """Add sentences one by one, reusing (word, POS) vertices across sentences.

    A vertex is reusable for a token when word and tag match and the current
    sentence has not claimed it yet. Among several reusable vertices the one
    with the larger adjacent-word overlap wins, then the more frequent one,
    then the earliest created.
    """
    sentences = list(cluster)
    if not sentences:
        raise ValueError("empty cluster")
    g = WordGraph(sentences)
    index: dict = {}  # (word, pos) -> [vertex ids in creation order]

    def neighbor_words(si: int, token_idx: int):
        toks = sentences[si].tokens
        left = toks[token_idx - 1].lower if token_idx > 0 else _START_WORD
        right = toks[token_idx + 1].lower if token_idx + 1 < len(toks) else _END_WORD
        return left, right

    for si, sent in enumerate(sentences):
        g.occ[START][si] = 0
        g.occ[END][si] = len(sent.tokens) + 1
        prev = START
        for j, tok in enumerate(sent.tokens):
            key = (tok.lower, tok.pos)
            candidates = [v for v in index.get(key, []) if si not in g.occ[v]]
            if not candidates:
                vid = g.n_vertices
                g.words.append(tok.lower)
                g.poss.append(tok.pos)
                g.occ.append({})
                index.setdefault(key, []).append(vid)
            elif len(candidates) == 1:
                vid = candidates[0]
            else:
                left, right = neighbor_words(si, j)
                scored = []
                for v in candidates:
                    overlap = 0
                    for s2, p2 in g.occ[v].items():
                        l2, r2 = neighbor_words(s2, p2 - 1)
                        overlap += (l2 == left) + (r2 == right)
                    scored.append((-overlap, -g.freq(v), v))
                vid = min(scored)[2]
            g.occ[vid][si] = j + 1
            g.adjacency.setdefault(prev, {}).setdefault(vid, []).append(si)
            prev = vid
        g.adjacency.setdefault(prev, {}).setdefault(END, []).append(si)
    return g


def edge_weight(graph: WordGraph, u: int, v: int) -> float:
    """Strong-link weight, normalized by vertex frequencies; lower is stronger.

    w = (freq(u) + freq(v)) / sum over sentences of 1/offset(u, v), with the
    sum running over sentences containing u before v; then w / (freq * freq).
    """
    if not graph.has_edge(u, v):
        raise ValueError(f"no edge {u} -> {v}")
    fu, fv = graph.freq(u), graph.freq(v)
    denom = 0.0
    for si, pu in graph.occ[u].items():
        pv = graph.occ[v].get(si)
        if pv is not None and pv > pu:
            denom += 1.0 / (pv - pu)
    w = (fu + fv) / denom
    return w / (fu * fv)


def _edge_weights(graph: WordGraph) -> dict:
    out = {}
    for u, targets in graph.adjacency.items():
        for v in targets:
            out[(u, v)] = edge_weight(graph, u, v)
    return out


def _prune_pareto(entries: list, k: int) -> list:
    """Keep entries dominated by fewer than k already-kept ones.

    An entry (W, L, path) is dominated by one with no larger edge sum and
    no smaller log probability; dominance is transitive, so counting only
    kept dominators is sound. Sorting puts dominators first, ties resolved
    by path so equal-cost walks stay in a deterministic order.
    """
    entries.sort(key=lambda e: (e[0], -e[1], e[2]))
    kept: list = []
    for w, lp, path in entries:
        dominators = sum(1 for kw, klp, _ in kept if kw <= w and klp >= lp)
        if dominators < k:
            kept.append((w, lp, path))
    return kept


def k_shortest_fusions(
    graph: WordGraph,
    k: int,
    a: float,
    lm,
    l_max: int = 40,
    min_tokens: int = 8,
    min_verbs: int = 1,
) -> list[FusionCandidate]:
    """Exact k cheapest valid start-to-end walks of at most ``l_max`` tokens.

    Walk cost blends the edge-weight sum with the inverted average log
    probability of the token sequence (see module docstring). States are
    (trailing context vertices, capped verb count) per depth layer; two
    walks in one state see identical extension costs, so per-state Pareto
    retention over (edge sum, log probability) preserves the global k best.
    Returns [] when no walk passes the validity bar (length, verb).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 <= a <= 1.0:
        raise ValueError("a must lie in [0, 1]")
    if a < 1.0 and lm is None:
        raise ValueError("a < 1 requires a language model")
    wp = _edge_weights(graph)
    lm_used = a < 1.0
    n_ctx = max(1, lm.order - 1) if lm_used and hasattr(lm, "order") else 1
    lm_scale = 1.0 - a

    def ctx_words(ctx_path: tuple) -> list:
        return [graph.words[x] for x in ctx_path if x != START]

    # layer state: (ctx vertices, verbs capped at min_verbs) -> [(W, logP, path)]
    layer = {((START,), 0): [(0.0, 0.0, (START,))]}
    completed = []
    for t in range(l_max + 1):
        extend = t < l_max
        nxt: dict = {}
        for (ctx, verbs), entries in layer.items():
            u = ctx[-1]
            for v in graph.out_edges(u):
                w_edge = wp[(u, v)]
                if v == END:
                    if t >= min_tokens and verbs >= min_verbs:
                        end_lp = lm.end_logprob(ctx_words(ctx)) if lm_used else 0.0
                        for w, lp, path in entries:
                            total = a * (w + w_edge)
                            if lm_used:
                                total += lm_scale * (t + 1) / (lp + end_lp)
                            completed.append((total, path + (END,)))
                    continue
                if not extend:
                    continue
                is_verb = 1 if graph.poss[v] == "VERB" else 0
                new_verbs = min(verbs + is_verb, min_verbs)
                tok_lp = lm.token_logprob(ctx_words(ctx), graph.words[v]) if lm_used else 0.0
                for w, lp, path in entries:
                    new_path = path + (v,)
                    new_ctx = new_path[-n_ctx:]
                    bucket = nxt.setdefault((new_ctx, new_verbs), [])
                    bucket.append((w + w_edge, lp + tok_lp, new_path))
        for key in nxt:
            nxt[key] = _prune_pareto(nxt[key], k)
        layer = nxt
        if not layer:
            break
    completed.sort()
    out = []
    for total, path in completed[:k]:
        tokens = tuple(graph.words[v] for v in path[1:-1])
        src = set()
        for v in path[1:-1]:
            for si in graph.occ[v]:
                s = graph.sentences[si]
                src.add((s.doc_id, s.index))
        if lm is not None:
            score = lm.sentence_logprob(list(tokens))
            total_lp, avg_lp = score.total, score.avg
        else:
            total_lp, avg_lp = 0.0, 0.0
        out.append(
            FusionCandidate(tokens, path, total, total_lp, avg_lp, tuple(sorted(src)))
        )
    return out


def ratcliff_obershelp(s1, s2) -> float:
    """2M / (|s1| + |s2|) where M sums recursive longest common blocks.

    The greedy longest-leftmost block choice is order-sensitive in corner
    cases, so arguments are put in a canonical order first; the score is
    symmetric by construction.
    """
    s1, s2 = list(s1), list(s2)
    if not s1 and not s2:
        return 1.0
    if not s1 or not s2:
        return 0.0
    if (len(s2), s2) < (len(s1), s1):
        s1, s2 = s2, s1
    ids: dict = {}
    a = np.fromiter((ids.setdefault(t, len(ids)) for t in s1), dtype=np.int32, count=len(s1))
    b = np.fromiter((ids.setdefault(t, len(ids)) for t in s2), dtype=np.int32, count=len(s2))
    m = _kernels.block_matches(a, b)
    return 2.0 * m / (len(s1) + len(s2))


def select_distinct(candidates, d_sim: float) -> list[FusionCandidate]:
    """Greedy filter: best average log probability first, near-copies dropped."""
    ranked = sorted(candidates, key=lambda c: (-c.avg_logprob, c.path_cost, c.tokens))
    kept: list[FusionCandidate] = []
    for cand in ranked:
        if all(ratcliff_obershelp(cand.tokens, other.tokens) < d_sim for other in kept):
            kept.append(cand)
    return kept
