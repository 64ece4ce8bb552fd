"""Scoring providers: sentence embeddings, n-gram language model, model bridge.

The defaults are deterministic substitutes for neural encoders/scorers: a
TF-IDF embedder and an add-k n-gram model. Real models plug in through the
newline-delimited JSON bridge protocol (see :class:`BridgeClient`); both
sides of that substitution expose the same call surface.
"""

from __future__ import annotations

import json
import math
import queue
import socket
import subprocess
import threading
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

PROB_FLOOR = 1e-8
LOGP_MIN = math.log(PROB_FLOOR)
LOGP_MAX = math.log(1.0 - PROB_FLOOR)

BOS = "<s>"
EOS = "</s>"

PROTOCOL_VERSION = 1


# --------------------------------------------------------------------------
# embeddings
# --------------------------------------------------------------------------


@dataclass
class TfidfEmbedder:
    """Sparse-vocabulary TF-IDF sentence embedder.

    ``vocabulary`` maps a lowercased term to its column; ``idf`` is aligned
    with the columns. Out-of-vocabulary terms embed to nothing, so an
    all-OOV sentence gets the zero vector.
    """

    vocabulary: dict[str, int]
    idf: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.vocabulary)

    def embed_words(self, words) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=np.float64)
        for w in words:
            col = self.vocabulary.get(w)
            if col is not None:
                vec[col] += self.idf[col]
        return vec

    def embed(self, sentence) -> np.ndarray:
        return self.embed_words(_content_words(sentence))

    def to_json(self) -> str:
        terms = sorted(self.vocabulary, key=self.vocabulary.get)
        payload = {
            "format": "heterosum-tfidf",
            "version": 1,
            "terms": terms,
            "idf": [self.idf[self.vocabulary[t]] for t in terms],
        }
        return json.dumps(payload, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "TfidfEmbedder":
        payload = json.loads(text)
        if payload.get("format") != "heterosum-tfidf" or payload.get("version") != 1:
            raise ValueError("not a v1 tfidf embedder dump")
        vocab = {t: i for i, t in enumerate(payload["terms"])}
        return cls(vocab, np.asarray(payload["idf"], dtype=np.float64))


def _content_words(sentence):
    return [t.lower for t in sentence.tokens if t.pos != "PUNCT"]


def build_tfidf_embedder(sentences) -> TfidfEmbedder:
    """idf(t) = ln(1 + N / (1 + df(t))) over lowercased non-punctuation terms."""
    sentences = list(sentences)
    if not sentences:
        raise ValueError("cannot build an embedder from an empty corpus")
    df = Counter()
    for s in sentences:
        df.update(set(_content_words(s)))
    n = len(sentences)
    vocab = {t: i for i, t in enumerate(sorted(df))}
    idf = np.zeros(len(vocab), dtype=np.float64)
    for t, i in vocab.items():
        idf[i] = math.log(1.0 + n / (1.0 + df[t]))
    return TfidfEmbedder(vocab, idf)


def embed(embedder, sentence) -> np.ndarray:
    return embedder.embed(sentence)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.clip(float(u @ v) / (nu * nv), -1.0, 1.0))


# --------------------------------------------------------------------------
# n-gram language model
# --------------------------------------------------------------------------


class SentenceScore(NamedTuple):
    total: float
    avg: float


@dataclass
class NGramLM:
    """Add-k n-gram model over token strings, begin/end padded.

    The vocabulary includes the end marker but not the begin marker, so for
    every context the conditional distribution over the vocabulary sums to 1.
    """

    order: int
    smoothing_k: float
    counts: dict = field(default_factory=dict)
    context_totals: dict = field(default_factory=dict)
    vocab: set = field(default_factory=set)

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def _context(self, prefix) -> tuple:
        if self.order == 1:
            return ()
        padded = [BOS] * (self.order - 1) + list(prefix)
        return tuple(padded[-(self.order - 1):])

    def conditional_prob(self, prefix, token: str) -> float:
        """Unclamped add-k probability of ``token`` after ``prefix``."""
        ctx = self._context(prefix)
        k = self.smoothing_k
        num = self.counts.get(ctx, {}).get(token, 0) + k
        den = self.context_totals.get(ctx, 0) + k * self.vocab_size
        return num / den

    def token_logprob(self, prefix, token: str) -> float:
        p = self.conditional_prob(prefix, token)
        return math.log(min(max(p, PROB_FLOOR), 1.0 - PROB_FLOOR))

    def sentence_logprob(self, tokens) -> SentenceScore:
        tokens = list(tokens)
        if not tokens:
            raise ValueError("cannot score an empty sequence")
        total = 0.0
        for i, tok in enumerate(tokens):
            total += self.token_logprob(tokens[:i], tok)
        return SentenceScore(total, total / len(tokens))

    def end_logprob(self, prefix) -> float:
        """Log probability of the sentence terminating after ``prefix``."""
        return self.token_logprob(prefix, EOS)

    def to_json(self) -> str:
        counts = {
            "\x1f".join(ctx): dict(sorted(toks.items()))
            for ctx, toks in self.counts.items()
        }
        payload = {
            "format": "heterosum-ngram",
            "version": 1,
            "order": self.order,
            "smoothing_k": self.smoothing_k,
            "vocab": sorted(self.vocab),
            "counts": counts,
        }
        return json.dumps(payload, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "NGramLM":
        payload = json.loads(text)
        if payload.get("format") != "heterosum-ngram" or payload.get("version") != 1:
            raise ValueError("not a v1 ngram dump")
        lm = cls(payload["order"], payload["smoothing_k"])
        lm.vocab = set(payload["vocab"])
        for key, toks in payload["counts"].items():
            ctx = tuple(key.split("\x1f")) if key else ()
            lm.counts[ctx] = dict(toks)
            lm.context_totals[ctx] = sum(toks.values())
        return lm


def train_ngram_lm(token_sequences, order: int = 3, smoothing_k: float = 0.01) -> NGramLM:
    if order < 1:
        raise ValueError("order must be >= 1")
    if smoothing_k <= 0:
        raise ValueError("smoothing_k must be > 0")
    sequences = [list(seq) for seq in token_sequences]
    if not sequences:
        raise ValueError("empty corpus")
    counts: dict = defaultdict(lambda: defaultdict(int))
    vocab: set = set()
    for seq in sequences:
        padded = [BOS] * (order - 1) + seq + [EOS]
        vocab.update(seq)
        vocab.add(EOS)
        for i in range(order - 1, len(padded)):
            ctx = tuple(padded[i - order + 1 : i])
            counts[ctx][padded[i]] += 1
    lm = NGramLM(order, smoothing_k)
    lm.vocab = vocab
    lm.counts = {ctx: dict(toks) for ctx, toks in counts.items()}
    lm.context_totals = {ctx: sum(toks.values()) for ctx, toks in lm.counts.items()}
    return lm


# --------------------------------------------------------------------------
# bridge client (newline-delimited JSON over stdio child or TCP)
# --------------------------------------------------------------------------


class BridgeError(Exception):
    pass


class BridgeTimeout(BridgeError):
    pass


class BridgeProtocolError(BridgeError):
    pass


class BridgeRemoteError(BridgeError):
    pass


class BridgeClient:
    """One-request-in-flight client for the bridge sidecar.

    ``endpoint`` is either ``tcp://host:port`` or an argv list to spawn a
    stdio child. Every request is one JSON line; every response must be one
    JSON line, in order.
    """

    def __init__(self, endpoint, timeout_ms: int = 10000):
        self.timeout = timeout_ms / 1000.0
        self._lock = threading.Lock()
        self._proc = None
        self._sock = None
        if isinstance(endpoint, str) and endpoint.startswith("tcp://"):
            host, _, port = endpoint[len("tcp://") :].rpartition(":")
            self._sock = socket.create_connection((host, int(port)), timeout=self.timeout)
            self._reader = self._sock.makefile("r", encoding="utf-8")
        else:
            argv = endpoint.split() if isinstance(endpoint, str) else list(endpoint)
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
            self._lines: queue.Queue = queue.Queue()
            t = threading.Thread(target=self._pump, daemon=True)
            t.start()

    def _pump(self):
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def _send_recv(self, payload: str) -> str:
        if self._sock is not None:
            self._sock.sendall((payload + "\n").encode("utf-8"))
            self._sock.settimeout(self.timeout)
            line = self._reader.readline()
            if not line:
                raise BridgeProtocolError("connection closed mid-request")
            return line
        self._proc.stdin.write(payload + "\n")
        self._proc.stdin.flush()
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise BridgeTimeout(f"no response within {self.timeout}s") from None
        if line is None:
            raise BridgeProtocolError("bridge process closed its output")
        return line

    def call(self, request: dict) -> dict:
        with self._lock:
            try:
                line = self._send_recv(json.dumps(request, ensure_ascii=False))
            except socket.timeout:
                raise BridgeTimeout(f"no response within {self.timeout}s") from None
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BridgeProtocolError(f"non-JSON response line: {line!r}") from exc
        if not isinstance(response, dict):
            raise BridgeProtocolError(f"response is not an object: {response!r}")
        if "error" in response:
            raise BridgeRemoteError(response["error"])
        return response

    def ping(self) -> bool:
        return bool(self.call({"op": "ping"}).get("ok"))

    def info(self) -> dict:
        info = self.call({"op": "info"})
        proto = info.get("protocol")
        if proto is not None and proto != PROTOCOL_VERSION:
            raise BridgeProtocolError(f"protocol version mismatch: {proto}")
        return info

    def embed_texts(self, texts) -> list[np.ndarray]:
        resp = self.call({"op": "embed", "texts": list(texts)})
        vectors = resp.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise BridgeProtocolError("embed response arity mismatch")
        return [np.asarray(v, dtype=np.float64) for v in vectors]

    def logprob(self, prefix, candidates) -> list[float]:
        resp = self.call({"op": "logprob", "prefix": list(prefix), "candidates": list(candidates)})
        logps = resp.get("logps")
        if not isinstance(logps, list) or len(logps) != len(candidates):
            raise BridgeProtocolError("logprob response arity mismatch")
        return [float(x) for x in logps]

    def rcr(self, sentence: str) -> str:
        return str(self.call({"op": "rcr", "sentence": sentence})["text"])

    def close(self):
        if self._sock is not None:
            self._sock.close()
        if self._proc is not None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            self._proc.wait(timeout=5)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def bridge_call(client: BridgeClient, request: dict) -> dict:
    return client.call(request)


class BridgeEmbedder:
    """Embeds sentences through the bridge instead of the TF-IDF default."""

    def __init__(self, client: BridgeClient):
        self.client = client

    def embed(self, sentence) -> np.ndarray:
        return self.client.embed_texts([sentence.text])[0]


class BridgeLanguageModel:
    """LM scoring through the bridge; clamps like the built-in provider."""

    def __init__(self, client: BridgeClient, order: int = 3):
        self.client = client
        self.order = order

    def token_logprob(self, prefix, token: str) -> float:
        lp = self.client.logprob(list(prefix), [token])[0]
        return min(max(lp, LOGP_MIN), LOGP_MAX)

    def end_logprob(self, prefix) -> float:
        return self.token_logprob(prefix, EOS)

    def sentence_logprob(self, tokens) -> SentenceScore:
        tokens = list(tokens)
        if not tokens:
            raise ValueError("cannot score an empty sequence")
        total = 0.0
        for i, tok in enumerate(tokens):
            total += self.token_logprob(tokens[:i], tok)
        return SentenceScore(total, total / len(tokens))


class FallbackEmbedder:
    """Tries the bridge first and silently degrades to the default provider."""

    def __init__(self, primary, fallback):
        self.primary = primary
        self.fallback = fallback

    def embed(self, sentence) -> np.ndarray:
        try:
            return self.primary.embed(sentence)
        except BridgeError:
            return self.fallback.embed(sentence)
