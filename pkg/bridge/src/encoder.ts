/**
 * Deterministic sentence embedder: hashed token vectors fed through a
 * fixed-seed recurrent layer, mean-pooled over the final-layer states.
 * No trained weights; the same text always maps to the same vector.
 */

import { Mat, Vec, addInto, matVec, randMat, tanhVec, zeros } from "./tensor.js";
import { Rng } from "./rng.js";

const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const MASK = (1n << 64n) - 1n;

function fnv1a(text: string): bigint {
  let h = FNV_OFFSET;
  for (let i = 0; i < text.length; i++) {
    h ^= BigInt(text.charCodeAt(i));
    h = (h * FNV_PRIME) & MASK;
  }
  return h;
}

export class Encoder {
  readonly dim: number;
  private w: Mat;
  private u: Mat;

  constructor(dim = 64, seed = 2024) {
    this.dim = dim;
    const rng = new Rng(seed);
    this.w = randMat(dim, dim, rng, 1 / Math.sqrt(dim));
    this.u = randMat(dim, dim, rng, 1 / Math.sqrt(dim));
  }

  private tokenVec(token: string): Vec {
    const v = zeros(this.dim);
    const rng = new Rng(fnv1a(token.toLowerCase()));
    for (let i = 0; i < this.dim; i++) v[i] = rng.normal();
    return v;
  }

  embed(text: string): number[] {
    const tokens = text.split(/\s+/).filter((t) => t.length > 0);
    const pooled = zeros(this.dim);
    if (tokens.length === 0) return Array.from(pooled);
    let state = zeros(this.dim);
    const pre = zeros(this.dim);
    const rec = zeros(this.dim);
    for (const tok of tokens) {
      matVec(this.w, this.tokenVec(tok), pre);
      matVec(this.u, state, rec);
      addInto(pre, rec);
      state = tanhVec(pre, zeros(this.dim));
      addInto(pooled, state);
    }
    for (let i = 0; i < this.dim; i++) pooled[i] /= tokens.length;
    return Array.from(pooled);
  }
}
