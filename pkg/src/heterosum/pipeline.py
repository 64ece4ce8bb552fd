"""End-to-end orchestration: extract, cluster, fuse, order, index.

Stage 1 ranks each document's sentences on a per-group TF-IDF similarity
graph and keeps the salient ones. Stage 2 clusters the survivors across
documents, fuses every multi-sentence cluster, and keeps distinct
candidates. The assembled summary is ordered by source position and passed
through a global redundancy filter so no output pair is a near-copy. An
optional third stage rewrites sentences through the bridge protocol.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field

from .cluster import multistage_cluster
from .corpus import Document
from .fusion import build_word_graph, k_shortest_fusions, ratcliff_obershelp, select_distinct
from .providers import BridgeClient, BridgeError, build_tfidf_embedder, train_ngram_lm
from .textrank import build_sentence_graph, pagerank, select_salient

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    damping: float = 0.85
    tau: float = 1e-4
    max_iters: int = 200
    min_edge_sim: float = 0.05
    select_mode: str = "drop"  # or "top_percent"
    top_r: float = 0.3
    tau_cluster: float = 2.0
    cluster_floor: float = 0.5
    k_paths: int = 10
    alpha: float = 0.5
    d_sim: float = 0.3
    l_max: int = 40
    min_tokens: int = 8
    min_verbs: int = 1
    lm_order: int = 3
    lm_smoothing: float = 0.01
    rcr_bridge: str | None = None


@dataclass
class SummarySentence:
    text: str
    kind: str  # "fused" | "verbatim"
    sources: tuple  # doc ids
    tokens: tuple = ()
    order_key: tuple = field(default=(), repr=False, compare=False)


@dataclass
class GroupSummary:
    sentences: list
    abstractive_ratio: float
    config_snapshot: dict
    group_id: int | None = None

    def texts(self) -> list[str]:
        return [s.text for s in self.sentences]

    def to_dict(self) -> dict:
        return {
            "group_id": self.group_id,
            "sentences": [
                {"text": s.text, "kind": s.kind, "sources": list(s.sources)}
                for s in self.sentences
            ],
            "abstractive_ratio": self.abstractive_ratio,
            "config": self.config_snapshot,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)


def _sentence_tokens(sentence) -> tuple:
    return tuple(t.lower for t in sentence.tokens)


def extract_salient(docs, config: PipelineConfig):
    """Stage 1 for every document; returns survivors plus their rank scores."""
    all_sentences = [s for doc in docs for s in doc.sentences]
    if not all_sentences:
        return [], {}
    embedder = build_tfidf_embedder(all_sentences)
    survivors = []
    scores = {}
    for doc in docs:
        if not doc.sentences:
            continue
        graph = build_sentence_graph(doc.sentences, embedder, config.min_edge_sim)
        rank = pagerank(graph, config.damping, config.tau, config.max_iters)
        kept = select_salient(rank, doc.sentences, config.select_mode, config.top_r)
        for s in kept:
            survivors.append(s)
            scores[(s.doc_id, s.index)] = rank.scores[s.index]
    return survivors, scores


def summarize_group(
    docs,
    config: PipelineConfig | None = None,
    group_id: int | None = None,
    lm=None,
) -> GroupSummary:
    """Run all stages over one document group.

    ``lm`` overrides the fusion language model; by default one is trained
    on the group's own sentences.
    """
    config = config or PipelineConfig()
    docs = list(docs)
    if not docs:
        raise ValueError("empty document group")
    survivors, scores = extract_salient(docs, config)
    if not survivors:
        return GroupSummary([], 0.0, asdict(config), group_id)

    if lm is None:
        lm = train_ngram_lm(
            [list(_sentence_tokens(s)) for doc in docs for s in doc.sentences],
            config.lm_order,
            config.lm_smoothing,
        )
    cluster_embedder = build_tfidf_embedder(survivors)
    clusters = multistage_cluster(survivors, cluster_embedder, config.tau_cluster, config.cluster_floor)

    entries: list[SummarySentence] = []
    for members_idx in clusters.clusters:
        members = [survivors[i] for i in members_idx]
        cluster_docs = tuple(sorted({s.doc_id for s in members}))
        anchor = min((s.doc_id, s.index) for s in members)
        if len(members) == 1:
            s = members[0]
            entries.append(
                SummarySentence(s.text, "verbatim", cluster_docs, _sentence_tokens(s), anchor + (0,))
            )
            continue
        graph = build_word_graph(members)
        candidates = k_shortest_fusions(
            graph,
            config.k_paths,
            config.alpha,
            lm,
            config.l_max,
            config.min_tokens,
            config.min_verbs,
        )
        if not candidates:
            best = max(members, key=lambda s: (scores[(s.doc_id, s.index)], (s.doc_id, s.index)))
            entries.append(
                SummarySentence(best.text, "verbatim", cluster_docs, _sentence_tokens(best), anchor + (0,))
            )
            continue
        for rank_i, cand in enumerate(select_distinct(candidates, config.d_sim)):
            entries.append(
                SummarySentence(cand.text, "fused", cluster_docs, cand.tokens, anchor + (rank_i,))
            )

    entries.sort(key=lambda e: e.order_key)
    kept: list[SummarySentence] = []
    for entry in entries:
        dup_of = None
        for prev in kept:
            if ratcliff_obershelp(entry.tokens, prev.tokens) >= config.d_sim:
                dup_of = prev
                break
        if dup_of is None:
            kept.append(entry)
        else:
            # fold the near-copy's provenance into the sentence that covers it
            dup_of.sources = tuple(sorted(set(dup_of.sources) | set(entry.sources)))

    if config.rcr_bridge:
        _apply_rcr(kept, config.rcr_bridge)

    fused = sum(1 for e in kept if e.kind == "fused")
    ratio = fused / len(kept) if kept else 0.0
    return GroupSummary(kept, ratio, asdict(config), group_id)


def _apply_rcr(entries, endpoint: str) -> None:
    try:
        client = BridgeClient(endpoint)
    except (OSError, BridgeError) as exc:
        logger.warning("bridge unavailable (%s); skipping rewrite pass", exc)
        return
    with client:
        for entry in entries:
            try:
                entry.text = client.rcr(entry.text)
            except BridgeError as exc:
                logger.warning("rewrite failed for %r: %s", entry.text[:40], exc)


# --------------------------------------------------------------------------
# keyword query index over summary sentences
# --------------------------------------------------------------------------


@dataclass
class Posting:
    group_id: int
    sentence_index: int
    text: str
    sources: tuple


@dataclass
class QueryIndex:
    postings: dict  # lowercased keyword -> list[Posting]

    def to_json(self) -> str:
        payload = {
            "format": "heterosum-index",
            "version": 1,
            "postings": {
                kw: [[p.group_id, p.sentence_index, p.text, list(p.sources)] for p in plist]
                for kw, plist in self.postings.items()
            },
        }
        return json.dumps(payload, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "QueryIndex":
        payload = json.loads(text)
        if payload.get("format") != "heterosum-index" or payload.get("version") != 1:
            raise ValueError("not a v1 query index")
        postings = {
            kw: [Posting(g, i, t, tuple(src)) for g, i, t, src in plist]
            for kw, plist in payload["postings"].items()
        }
        return cls(postings)


def build_query_index(summaries, keywords) -> QueryIndex:
    """Exact lowercased token-match postings with document traceback."""
    keywords = [k.lower() for k in keywords]
    if not keywords:
        raise ValueError("keywords must be supplied")
    postings: dict = {k: [] for k in keywords}
    for pos, summary in enumerate(summaries):
        gid = summary.group_id if summary.group_id is not None else pos
        for si, sent in enumerate(summary.sentences):
            toks = set(sent.tokens) or {t.lower() for t in sent.text.split()}
            for kw in keywords:
                if kw in toks:
                    postings[kw].append(Posting(gid, si, sent.text, tuple(sent.sources)))
    for kw in postings:
        postings[kw].sort(key=lambda p: (p.group_id, p.sentence_index))
    return QueryIndex(postings)


def query(index: QueryIndex, term: str) -> list:
    return list(index.postings.get(term.lower(), []))
