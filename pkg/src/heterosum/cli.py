"""Command line front end: summarize, gen-dataset, evaluate, build-index, query."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dataset as ds
from . import metrics
from .corpus import ingest_jsonl
from .pipeline import PipelineConfig, QueryIndex, build_query_index, query, summarize_group
from .providers import NGramLM, train_ngram_lm


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--tau", type=float, default=1e-4, help="rank convergence threshold")
    p.add_argument("--min-edge-sim", type=float, default=0.05)
    p.add_argument("--mode", choices=["drop", "top_percent"], default="drop")
    p.add_argument("--top-r", type=float, default=0.3)
    p.add_argument("--tau-cluster", type=float, default=2.0)
    p.add_argument("--cluster-floor", type=float, default=0.5)
    p.add_argument("--k", type=int, default=10, help="fusion candidates per cluster")
    p.add_argument("--alpha", type=float, default=0.5, help="edge-weight vs LM cost blend")
    p.add_argument("--dsim", type=float, default=0.3, help="distinctness threshold")
    p.add_argument("--l-max", type=int, default=40)
    p.add_argument("--min-tokens", type=int, default=8)
    p.add_argument("--min-verbs", type=int, default=1)
    p.add_argument("--lm-order", type=int, default=3)
    p.add_argument("--lm-k", type=float, default=0.01)
    p.add_argument("--lm-model", default=None, help="saved n-gram dump; overrides per-group training")
    p.add_argument("--rcr-bridge", default=None, help="tcp://host:port or a sidecar command")


def _config_from(args) -> PipelineConfig:
    return PipelineConfig(
        damping=args.damping,
        tau=args.tau,
        min_edge_sim=args.min_edge_sim,
        select_mode=args.mode,
        top_r=args.top_r,
        tau_cluster=args.tau_cluster,
        cluster_floor=args.cluster_floor,
        k_paths=args.k,
        alpha=args.alpha,
        d_sim=args.dsim,
        l_max=args.l_max,
        min_tokens=args.min_tokens,
        min_verbs=args.min_verbs,
        lm_order=args.lm_order,
        lm_smoothing=args.lm_k,
        rcr_bridge=args.rcr_bridge,
    )


def _cmd_summarize(args) -> int:
    config = _config_from(args)
    lm = None
    if args.lm_model:
        lm = NGramLM.from_json(Path(args.lm_model).read_text(encoding="utf-8"))
    first = None
    with open(args.input, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                first = json.loads(line)
                break
    if first is None:
        print("input file holds no documents", file=sys.stderr)
        return 1
    out_path = Path(args.out)
    if "docs" in first:
        groups = ds.load_groups(args.input)
        with open(out_path, "w", encoding="utf-8") as fh:
            for g in groups:
                summary = summarize_group(g.docs, config, group_id=g.group_id, lm=lm)
                fh.write(summary.to_json() + "\n")
        print(f"wrote {len(groups)} group summaries to {out_path}")
    else:
        docs = ingest_jsonl(args.input)
        summary = summarize_group(docs, config, lm=lm)
        out_path.write_text(summary.to_json() + "\n", encoding="utf-8")
        print(f"wrote summary ({len(summary.sentences)} sentences) to {out_path}")
    return 0


def _cmd_gen_dataset(args) -> int:
    corpus = ingest_jsonl(args.corpus)
    data = ds.generate_groups(corpus, args.scale, args.groups, args.seed, replace=args.with_replacement)
    ds.write_groups(data, args.out)
    stats = ds.dataset_stats(data)
    print(
        f"wrote {stats.groups} groups to {args.out} "
        f"(mean article words {stats.mean_article_words:.2f}, "
        f"mean summary words {stats.mean_summary_words:.2f})"
    )
    return 0


def _read_jsonl_field(path, *names):
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if "sentences" in obj and isinstance(obj["sentences"], list):
                # a summarize output row: join its sentence texts
                out.append("\n".join(s["text"] for s in obj["sentences"]))
                continue
            for name in names:
                if name in obj and obj[name] is not None:
                    out.append(obj[name])
                    break
            else:
                raise ValueError(f"{path}:{lineno}: none of {names} present")
    return out


def _cmd_evaluate(args) -> int:
    cands = _read_jsonl_field(args.candidates, "summary", "text")
    refs = _read_jsonl_field(args.references, "gold_summary", "summary", "text")
    if len(cands) != len(refs):
        print(f"candidate/reference count mismatch: {len(cands)} vs {len(refs)}", file=sys.stderr)
        return 1
    if isinstance(cands[0], list):
        cands = [" ".join(c) for c in cands]
    wanted = [m.strip() for m in args.metrics.split(",") if m.strip()]
    lm = None
    if "logprob" in wanted:
        if args.lm_model:
            lm = NGramLM.from_json(Path(args.lm_model).read_text(encoding="utf-8"))
        else:
            from .corpus import tokenize

            lm = train_ngram_lm([[t.lower() for t in tokenize(r)] for r in refs])
    report: dict = {"pairs": len(cands), "metrics": {}}
    rouge_ops = {"rouge1": lambda c, r: metrics.rouge_n(c, r, 1),
                 "rouge2": lambda c, r: metrics.rouge_n(c, r, 2),
                 "rougeL": metrics.rouge_l}
    for name in wanted:
        if name in rouge_ops:
            scores = [rouge_ops[name](c, r) for c, r in zip(cands, refs)]
            report["metrics"][name] = {
                "recall": sum(s.recall for s in scores) / len(scores),
                "precision": sum(s.precision for s in scores) / len(scores),
                "f1": sum(s.f1 for s in scores) / len(scores),
            }
        elif name == "dalechall":
            vals = [metrics.dale_chall(c) for c in cands if c.strip()]
            report["metrics"][name] = sum(vals) / len(vals) if vals else 0.0
        elif name == "logprob":
            from .corpus import segment_sentences

            vals = []
            for c in cands:
                sents = segment_sentences(c)
                if sents:
                    vals.append(metrics.summary_fluency(sents, lm).avg_sentence_logprob)
            report["metrics"][name] = sum(vals) / len(vals) if vals else 0.0
        else:
            print(f"unknown metric {name!r}", file=sys.stderr)
            return 1
    Path(args.report).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for name, val in report["metrics"].items():
        shown = val["f1"] if isinstance(val, dict) else val
        print(f"{name}: {shown:.4f}")
    return 0


def _cmd_build_index(args) -> int:
    keywords = [w for w in Path(args.keywords).read_text(encoding="utf-8").split() if w]
    summaries = []
    with open(args.summaries, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            from .pipeline import GroupSummary, SummarySentence

            sents = [
                SummarySentence(
                    s["text"], s.get("kind", "verbatim"), tuple(s.get("sources", [])),
                    tuple(t.lower() for t in s["text"].split()),
                )
                for s in obj["sentences"]
            ]
            summaries.append(GroupSummary(sents, obj.get("abstractive_ratio", 0.0), obj.get("config", {}), obj.get("group_id")))
    index = build_query_index(summaries, keywords)
    Path(args.out).write_text(index.to_json() + "\n", encoding="utf-8")
    total = sum(len(v) for v in index.postings.values())
    print(f"indexed {len(index.postings)} keywords, {total} postings -> {args.out}")
    return 0


def _cmd_query(args) -> int:
    index = QueryIndex.from_json(Path(args.index).read_text(encoding="utf-8"))
    hits = query(index, args.term)
    for p in hits:
        print(f"[group {p.group_id} #{p.sentence_index}] {p.text}  <- {','.join(p.sources)}")
    print(f"{len(hits)} hit(s)")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="heterosum", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summarize", help="summarize one document group or a groups file")
    p.add_argument("--input", required=True, help="documents JSONL, or gen-dataset output")
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=_cmd_summarize)

    p = sub.add_parser("gen-dataset", help="build document groups from a corpus")
    p.add_argument("--corpus", required=True, help="JSONL with id/text/summary per line")
    p.add_argument("--scale", type=int, required=True, help="documents per group")
    p.add_argument("--groups", type=int, required=True, help="number of groups")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--with-replacement", action="store_true")
    p.set_defaults(func=_cmd_gen_dataset)

    p = sub.add_parser("evaluate", help="score candidate summaries against references")
    p.add_argument("--candidates", required=True)
    p.add_argument("--references", required=True)
    p.add_argument("--metrics", default="rouge1,rouge2,rougeL")
    p.add_argument("--report", required=True)
    p.add_argument("--lm-model", default=None, help="saved n-gram model for the logprob metric")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("build-index", help="keyword index over summary sentences")
    p.add_argument("--summaries", required=True, help="JSONL written by summarize")
    p.add_argument("--keywords", required=True, help="whitespace-separated keyword file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_build_index)

    p = sub.add_parser("query", help="look up a keyword in a built index")
    p.add_argument("--index", required=True)
    p.add_argument("--term", required=True)
    p.set_defaults(func=_cmd_query)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
