/**
 * Training pairs for the rewriter.
 *
 * Pairs come either from aligning an entity-expanded sentence against its
 * original (matching tokens copy, pronoun-for-entity swaps replace, anything
 * else drops the pair), or from a seeded template generator that produces
 * clean length-preserving pairs for the toy-scale learning bar.
 */

import { BOS, Example, PAD, RcrConfig } from "./model.js";
import { Rng } from "../rng.js";

export const REPLACEMENTS = [
  "he", "him", "his", "she", "her", "hers", "it", "its", "they",
  "them", "their", "we", "us", "our", "this", "that", "these", "those",
];

export interface RawPair {
  expanded: string[];
  original: string[];
}

export interface AlignStats {
  kept: number;
  droppedUnalignable: number;
  droppedTooLong: number;
}

/**
 * Align original tokens onto the expanded sentence.
 *
 * Walks both sequences left to right: equal tokens become COPY actions;
 * an original-side replacement word consumes up to `window` expanded tokens
 * (the entity mention) and becomes a REPLACE action. Pairs that cannot be
 * aligned this way are dropped and counted.
 */
export function makeTrainingPairs(
  pairs: RawPair[],
  maxLen: number,
  replacements: string[] = REPLACEMENTS,
  window = 4
): { actions: { tokens: string[]; target: number[] }[]; stats: AlignStats } {
  const repIndex = new Map(replacements.map((w, i) => [w, i]));
  const out: { tokens: string[]; target: number[] }[] = [];
  const stats: AlignStats = { kept: 0, droppedUnalignable: 0, droppedTooLong: 0 };
  for (const { expanded, original } of pairs) {
    if (expanded.length > maxLen || original.length > expanded.length) {
      stats.droppedTooLong += 1;
      continue;
    }
    const target: number[] = [];
    let i = 0;
    let ok = true;
    for (let j = 0; j < original.length; j++) {
      const tok = original[j];
      if (i < expanded.length && expanded[i] === tok) {
        target.push(i);
        i += 1;
        continue;
      }
      const rep = repIndex.get(tok);
      if (rep === undefined) {
        ok = false;
        break;
      }
      // consume the entity span: skip ahead until the next original token matches
      const next = original[j + 1];
      let skip = i + 1;
      if (next !== undefined) {
        let found = -1;
        for (let s = i + 1; s <= Math.min(i + window, expanded.length); s++) {
          if (expanded[s] === next) {
            found = s;
            break;
          }
        }
        if (found < 0) {
          ok = false;
          break;
        }
        skip = found;
      }
      target.push(maxLen + rep);
      i = skip;
    }
    if (!ok || target.length === 0) {
      stats.droppedUnalignable += 1;
      continue;
    }
    out.push({ tokens: expanded, target });
    stats.kept += 1;
  }
  return { actions: out, stats };
}

// ---------------------------------------------------------------------------
// synthetic generator: names with fixed pronouns dropped into templates
// ---------------------------------------------------------------------------

const NAMES: [string, string, string][] = [
  // name, subject pronoun, possessive pronoun
  ["tom", "he", "his"],
  ["anna", "she", "her"],
  ["omar", "he", "his"],
  ["maria", "she", "her"],
  ["viktor", "he", "his"],
  ["lena", "she", "her"],
];

// second slot kind: "subj" swaps to the subject pronoun, "poss" to possessive
const TEMPLATES: { words: string[]; kind: "subj" | "poss" }[] = [
  { words: ["NAME", "said", "NAME", "would", "win", "the", "game"], kind: "subj" },
  { words: ["NAME", "lost", "NAME", "keys", "at", "the", "station"], kind: "poss" },
  { words: ["NAME", "thinks", "NAME", "plan", "needs", "more", "time"], kind: "poss" },
  { words: ["friends", "saw", "NAME", "after", "NAME", "arrived", "home"], kind: "subj" },
  { words: ["NAME", "brought", "NAME", "lunch", "to", "the", "office"], kind: "poss" },
  { words: ["NAME", "hopes", "NAME", "can", "join", "the", "trip"], kind: "subj" },
  { words: ["NAME", "parked", "NAME", "car", "near", "the", "gate"], kind: "poss" },
  { words: ["the", "crowd", "cheered", "NAME", "when", "NAME", "scored"], kind: "subj" },
];

export interface SyntheticPair {
  expanded: string[];
  original: string[];
}

/** Instantiate every template x name combination; deterministic order. */
export function allSyntheticPairs(): SyntheticPair[] {
  const out: SyntheticPair[] = [];
  for (const template of TEMPLATES) {
    const nameSlots = template.words
      .map((w, i) => (w === "NAME" ? i : -1))
      .filter((i) => i >= 0);
    const last = nameSlots[nameSlots.length - 1];
    for (const [name, subj, poss] of NAMES) {
      const expanded = template.words.map((w) => (w === "NAME" ? name : w));
      const original = [...expanded];
      original[last] = template.kind === "subj" ? subj : poss;
      out.push({ expanded, original });
    }
  }
  return out;
}

/** Seeded split into train and held-out sets of template x name combos. */
export function syntheticSplit(seed: number, holdOut = 8): {
  train: SyntheticPair[];
  held: SyntheticPair[];
} {
  const pairs = allSyntheticPairs();
  const rng = new Rng(seed);
  const order = [...pairs.keys()];
  for (let i = order.length - 1; i > 0; i--) {
    const j = rng.below(i + 1);
    [order[i], order[j]] = [order[j], order[i]];
  }
  const held = order.slice(0, holdOut).map((i) => pairs[i]);
  const train = order.slice(holdOut).map((i) => pairs[i]);
  return { train, held };
}

/** Build the model vocabulary and padded examples from token/action pairs. */
export function buildDataset(
  pairs: { tokens: string[]; target: number[] }[],
  maxLen: number,
  hs: number,
  replacements: string[] = REPLACEMENTS
): { config: RcrConfig; examples: Example[] } {
  const vocab: string[] = [PAD, BOS];
  const seen = new Set(vocab);
  const add = (w: string) => {
    if (!seen.has(w)) {
      seen.add(w);
      vocab.push(w);
    }
  };
  for (const r of replacements) add(r);
  for (const p of pairs) for (const w of p.tokens) add(w);
  const wordId = new Map(vocab.map((w, i) => [w, i]));
  const examples: Example[] = pairs.map((p) => {
    const tokens = p.tokens.map((w) => wordId.get(w)!);
    while (tokens.length < maxLen) tokens.push(0);
    return { tokens, length: p.tokens.length, target: p.target };
  });
  return { config: { hs, maxLen, vocab, replacements }, examples };
}

/** Expanded-token actions for a raw pair set, using a shared action space. */
export function pairsToActions(
  pairs: SyntheticPair[],
  maxLen: number,
  replacements: string[] = REPLACEMENTS
): { tokens: string[]; target: number[] }[] {
  const { actions, stats } = makeTrainingPairs(pairs, maxLen, replacements);
  if (stats.kept !== pairs.length) {
    throw new Error(`synthetic pairs must all align (kept ${stats.kept}/${pairs.length})`);
  }
  return actions;
}
