import json

import pytest

from heterosum.corpus import Document
from heterosum.dataset import (
    SplitMix64,
    dataset_stats,
    generate_groups,
    load_groups,
    write_groups,
)


def make_corpus(n, words_per_doc=6):
    docs = []
    for i in range(n):
        body = " ".join(f"word{i}x{j}" for j in range(words_per_doc))
        docs.append(Document.from_text(f"doc-{i}", f"{body}.", gold_summary=f"summary {i}."))
    return docs


class TestSplitMix64:
    def test_deterministic_stream(self):
        a = SplitMix64(42)
        b = SplitMix64(42)
        assert [a.next_u64() for _ in range(5)] == [b.next_u64() for _ in range(5)]

    def test_known_first_value(self):
        # reference value of splitmix64(seed=0) first output
        assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF

    def test_randbelow_range(self):
        rng = SplitMix64(7)
        draws = [rng.randbelow(10) for _ in range(200)]
        assert set(draws) <= set(range(10))
        assert len(set(draws)) == 10

    def test_randbelow_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            SplitMix64(1).randbelow(0)


class TestGenerateGroups:
    def test_single_doc_forced_duplication(self):
        corpus = make_corpus(1)
        ds = generate_groups(corpus, s=3, m=1, seed=11)
        (group,) = ds.groups
        assert len(group.docs) == 3
        assert all(d.id == "doc-0" for d in group.docs)
        assert group.gold_summary == "summary 0."  # one copy only

    def test_shipped_configurations(self):
        corpus = make_corpus(40)
        a = generate_groups(corpus, s=10, m=100, seed=1)
        b = generate_groups(corpus, s=100, m=10, seed=1)
        assert len(a.groups) == 100 and all(len(g.docs) == 10 for g in a.groups)
        assert len(b.groups) == 10 and all(len(g.docs) == 100 for g in b.groups)

    def test_byte_identical_per_seed(self, tmp_path):
        corpus = make_corpus(12)
        p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_groups(generate_groups(corpus, 5, 7, seed=99), p1)
        write_groups(generate_groups(corpus, 5, 7, seed=99), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_seeds_differ(self):
        corpus = make_corpus(12)
        a = generate_groups(corpus, 5, 3, seed=1)
        b = generate_groups(corpus, 5, 3, seed=2)
        assert any(x.sources != y.sources for x, y in zip(a.groups, b.groups))

    def test_one_copy_rule(self):
        corpus = make_corpus(3)
        ds = generate_groups(corpus, s=9, m=5, seed=3)
        for g in ds.groups:
            distinct = []
            for d in g.docs:
                if d.id not in distinct:
                    distinct.append(d.id)
            expected = "\n".join(f"summary {i.split('-')[1]}." for i in distinct)
            assert g.gold_summary == expected

    def test_draw_slots_distinct(self):
        # without replacement: no source can exceed its three copies
        corpus = make_corpus(2)
        ds = generate_groups(corpus, s=6, m=10, seed=5)
        for g in ds.groups:
            for doc_id in {d.id for d in g.docs}:
                assert sum(1 for d in g.docs if d.id == doc_id) <= 3

    def test_tripling_bound(self):
        corpus = make_corpus(2)
        ds = generate_groups(corpus, s=6, m=1, seed=1)  # s == 3|D| drains the pool
        (group,) = ds.groups
        assert sorted(d.id for d in group.docs) == ["doc-0"] * 3 + ["doc-1"] * 3
        with pytest.raises(ValueError, match="too small"):
            generate_groups(corpus, s=7, m=1, seed=1)

    def test_with_replacement_allows_more(self):
        corpus = make_corpus(1)
        ds = generate_groups(corpus, s=5, m=1, seed=1, replace=True)
        assert len(ds.groups[0].docs) == 5

    def test_missing_summary_rejected(self):
        doc = Document.from_text("d", "Some text here.")
        with pytest.raises(ValueError, match="lacks a summary"):
            generate_groups([doc], 1, 1, seed=0)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            generate_groups([], 1, 1, seed=0)


class TestDatasetStats:
    def test_arithmetic_fixture(self):
        d1 = Document.from_text("a", " ".join(["w"] * 10) + ".", gold_summary="one two")
        d2 = Document.from_text("b", " ".join(["v"] * 20) + ".", gold_summary="three")
        ds = generate_groups([d1, d2], s=6, m=4, seed=0)
        stats = dataset_stats(ds)
        # every group drains the pool: 3*(10+20) article words, both summaries
        assert stats.mean_article_words == pytest.approx(90.0)
        assert stats.mean_summary_words == pytest.approx(3.0)

    def test_empty_summary_contributes_zero(self):
        d1 = Document.from_text("a", "w w w.", gold_summary="")
        ds = generate_groups([d1], s=3, m=2, seed=0)
        stats = dataset_stats(ds)
        assert stats.mean_summary_words == 0.0

    def test_doubling_scale_doubles_articles(self):
        corpus = make_corpus(60, words_per_doc=8)
        means = {}
        for s in (5, 10):
            totals = []
            for seed in range(30):
                ds = generate_groups(corpus, s=s, m=4, seed=seed)
                totals.append(dataset_stats(ds).mean_article_words)
            means[s] = sum(totals) / len(totals)
        assert means[10] == pytest.approx(2 * means[5], rel=0.10)


class TestRoundTrip:
    def test_write_then_load(self, tmp_path):
        corpus = make_corpus(4)
        ds = generate_groups(corpus, s=3, m=2, seed=8)
        path = tmp_path / "groups.jsonl"
        write_groups(ds, path)
        loaded = load_groups(path)
        assert len(loaded) == 2
        for orig, back in zip(ds.groups, loaded):
            assert back.group_id == orig.group_id
            assert back.gold_summary == orig.gold_summary
            assert back.sources == orig.sources
            assert [d.raw_text for d in back.docs] == [d.raw_text for d in orig.docs]

    def test_schema_fields(self, tmp_path):
        corpus = make_corpus(2)
        ds = generate_groups(corpus, s=2, m=1, seed=8)
        path = tmp_path / "groups.jsonl"
        write_groups(ds, path)
        row = json.loads(path.read_text().splitlines()[0])
        assert set(row) == {"group_id", "docs", "gold_summary", "sources"}
        assert set(row["docs"][0]) == {"id", "text", "summary"}
