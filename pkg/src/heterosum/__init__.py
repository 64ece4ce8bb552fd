"""Unsupervised summarization of heterogeneous document groups."""

from .cluster import ClusterSet, multistage_cluster, ward_agglomerate
from .corpus import Document, Sentence, Token, ingest_jsonl, segment_sentences, tag_tokens
from .dataset import GroupDataset, dataset_stats, generate_groups
from .fusion import (
    FusionCandidate,
    WordGraph,
    build_word_graph,
    edge_weight,
    k_shortest_fusions,
    ratcliff_obershelp,
    select_distinct,
)
from .metrics import RougeScore, dale_chall, rouge_l, rouge_n, summary_fluency
from .pipeline import (
    GroupSummary,
    PipelineConfig,
    QueryIndex,
    build_query_index,
    query,
    summarize_group,
)
from .providers import (
    BridgeClient,
    NGramLM,
    TfidfEmbedder,
    build_tfidf_embedder,
    cosine,
    embed,
    train_ngram_lm,
)
from .textrank import RankResult, SentenceGraph, build_sentence_graph, pagerank, select_salient

__version__ = "0.1.0"
