/**
 * CLI.
 *
 *   bridge serve --stdio [--corpus f.jsonl] [--rcr-model ckpt.json] [--dim 64]
 *   bridge serve --tcp <port> [...]
 *   bridge train-rcr --out ckpt.json [--hs 32] [--epochs 60] [--seed 7]
 *
 * The embedder is always available. logprob requires --corpus (an n-gram
 * model is fitted at startup); rcr requires a trained checkpoint.
 */

import * as fs from "node:fs";

import { Encoder } from "./encoder.js";
import { NGramLM, tokenizeLine } from "./ngram.js";
import { Handlers } from "./protocol.js";
import { runStdio, runTcp } from "./server.js";
import { RcrModel, train } from "./rcr/model.js";
import { buildDataset, pairsToActions, syntheticSplit } from "./rcr/data.js";

function flagValue(argv: string[], name: string): string | undefined {
  const i = argv.indexOf(name);
  return i >= 0 ? argv[i + 1] : undefined;
}

function loadCorpusSequences(path: string): string[][] {
  const sequences: string[][] = [];
  for (const line of fs.readFileSync(path, "utf-8").split("\n")) {
    if (!line.trim()) continue;
    let text = line;
    if (line.trimStart().startsWith("{")) {
      try {
        const obj = JSON.parse(line);
        text = typeof obj.text === "string" ? obj.text : "";
      } catch {
        text = "";
      }
    }
    if (text) sequences.push(tokenizeLine(text));
  }
  return sequences;
}

function rcrRewrite(model: RcrModel, sentence: string): string {
  const words = sentence.split(/\s+/).filter((w) => w.length > 0);
  const lower = words.map((w) => w.toLowerCase());
  if (words.length === 0 || words.length > model.cfg.maxLen) return sentence;
  const tokens = lower.map((w) => model.wordId.get(w) ?? 0);
  if (tokens.some((t) => t === 0)) return sentence; // out-of-vocabulary input
  const padded = [...tokens];
  while (padded.length < model.cfg.maxLen) padded.push(0);
  const actions = model.decode(padded, words.length);
  return model.actionsToWords(actions, padded).join(" ");
}

function cmdServe(argv: string[]): Promise<unknown> {
  const dim = Number(flagValue(argv, "--dim") ?? 64);
  const encoder = new Encoder(dim);
  let lm: NGramLM | undefined;
  const corpus = flagValue(argv, "--corpus");
  if (corpus) {
    lm = new NGramLM(Number(flagValue(argv, "--lm-order") ?? 3));
    lm.train(loadCorpusSequences(corpus));
  }
  let rcr: RcrModel | undefined;
  const ckpt = flagValue(argv, "--rcr-model");
  if (ckpt) rcr = RcrModel.fromJSON(fs.readFileSync(ckpt, "utf-8"));

  const handlers: Handlers = {
    info: () => ({
      dim,
      pooling: "mean",
      ops: { embed: true, logprob: Boolean(lm), rcr: Boolean(rcr) },
    }),
    embed: (texts) => texts.map((t) => encoder.embed(t)),
    logprob: lm ? (prefix, cands) => cands.map((c) => lm!.logprob(prefix, c)) : undefined,
    rcr: rcr ? (sentence) => rcrRewrite(rcr!, sentence) : undefined,
  };

  const tcp = flagValue(argv, "--tcp");
  if (tcp) {
    runTcp(Number(tcp), handlers);
    console.error(`bridge listening on tcp port ${tcp}`);
    return new Promise(() => undefined);
  }
  return runStdio(handlers);
}

function cmdTrainRcr(argv: string[]): number {
  const out = flagValue(argv, "--out") ?? "rcr-checkpoint.json";
  const hs = Number(flagValue(argv, "--hs") ?? 32);
  const epochs = Number(flagValue(argv, "--epochs") ?? 60);
  const seed = Number(flagValue(argv, "--seed") ?? 7);
  const maxLen = 20;
  const { train: trainPairs, held } = syntheticSplit(seed);
  const actions = pairsToActions([...trainPairs, ...held], maxLen);
  const { config, examples } = buildDataset(actions, maxLen, hs);
  const model = new RcrModel(config, seed);
  const trainExamples = examples.slice(0, trainPairs.length);
  const lastLoss = train(model, trainExamples, { epochs, seed });
  let exact = 0;
  for (let i = trainPairs.length; i < examples.length; i++) {
    const ex = examples[i];
    const got = model.decode(ex.tokens, ex.length);
    if (got.length === ex.target.length && got.every((a, j) => a === ex.target[j])) exact += 1;
  }
  fs.writeFileSync(out, model.toJSON());
  console.error(
    `trained on ${trainExamples.length} pairs, final loss ${lastLoss.toFixed(4)}, ` +
      `held-out exact ${exact}/${examples.length - trainPairs.length}; saved ${out}`
  );
  return 0;
}

async function main(): Promise<number> {
  const argv = process.argv.slice(2);
  const cmd = argv[0];
  if (cmd === "serve") {
    await cmdServe(argv.slice(1));
    return 0;
  }
  if (cmd === "train-rcr") {
    return cmdTrainRcr(argv.slice(1));
  }
  console.error("usage: bridge serve --stdio|--tcp <port> [options] | bridge train-rcr [options]");
  return 2;
}

main().then((code) => {
  process.exitCode = code;
});
